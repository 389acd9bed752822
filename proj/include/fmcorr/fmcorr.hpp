#pragma once

// Umbrella header for the functional-map correspondence toolkit.

#include "fmcorr/common.hpp"
#include "fmcorr/core/fmb.hpp"
#include "fmcorr/core/injection.hpp"
#include "fmcorr/core/mesh.hpp"
#include "fmcorr/core/mesh_io.hpp"
#include "fmcorr/core/spatial_grid.hpp"
#include "fmcorr/descriptors/hks.hpp"
#include "fmcorr/descriptors/shot.hpp"
#include "fmcorr/eval/curves.hpp"
#include "fmcorr/fmap/functional_map.hpp"
#include "fmcorr/fmap/point_map.hpp"
#include "fmcorr/fmap/soft_correspondence.hpp"
#include "fmcorr/fmnet/adam.hpp"
#include "fmcorr/fmnet/checkpoint.hpp"
#include "fmcorr/fmnet/fmnet_loss.hpp"
#include "fmcorr/fmnet/network.hpp"
#include "fmcorr/fmnet/siamese.hpp"
#include "fmcorr/fmnet/train.hpp"
#include "fmcorr/geodesics/geodesics.hpp"
#include "fmcorr/io/artifacts.hpp"
#include "fmcorr/io/config.hpp"
#include "fmcorr/io/manifest.hpp"
#include "fmcorr/spectral/eigensolver.hpp"
#include "fmcorr/spectral/laplacian.hpp"
#include "fmcorr/spectral/projection.hpp"
#include "fmcorr/upscale/admm.hpp"
#include "fmcorr/upscale/upscale.hpp"
