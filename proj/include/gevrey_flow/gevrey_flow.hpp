#pragma once

#include "gevrey_flow/errors.hpp"
#include "gevrey_flow/lattice.hpp"
#include "gevrey_flow/spectral_field.hpp"
#include "gevrey_flow/norms.hpp"
#include "gevrey_flow/fft.hpp"
#include "gevrey_flow/convolution.hpp"
#include "gevrey_flow/model.hpp"
#include "gevrey_flow/parallel.hpp"
#include "gevrey_flow/stochastic.hpp"
#include "gevrey_flow/initial_data.hpp"
#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/diagnostics.hpp"
#include "gevrey_flow/config.hpp"
#include "gevrey_flow/output.hpp"
#include "gevrey_flow/cli.hpp"
