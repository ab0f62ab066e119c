#pragma once

#include "scenesynth/anneal.hpp"
#include "scenesynth/camera.hpp"
#include "scenesynth/dha.hpp"
#include "scenesynth/energy.hpp"
#include "scenesynth/geometry.hpp"
#include "scenesynth/image.hpp"
#include "scenesynth/inpaint.hpp"
#include "scenesynth/json_io.hpp"
#include "scenesynth/mesh.hpp"
#include "scenesynth/metrics.hpp"
#include "scenesynth/obj_io.hpp"
#include "scenesynth/pipeline.hpp"
#include "scenesynth/png_io.hpp"
#include "scenesynth/priors.hpp"
#include "scenesynth/rasterize.hpp"
#include "scenesynth/rng.hpp"
#include "scenesynth/scene.hpp"
#include "scenesynth/sensor.hpp"
#include "scenesynth/taxonomy.hpp"
#include "scenesynth/viewpoints.hpp"
