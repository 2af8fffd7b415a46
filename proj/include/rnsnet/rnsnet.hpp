/**
 * @file rnsnet.hpp
 * @brief Umbrella header.
 * @license Apache-2.0
 */

#pragma once

#include "rnsnet/bitvec.hpp"
#include "rnsnet/energy.hpp"
#include "rnsnet/hw/multiplier.hpp"
#include "rnsnet/hw/parity_circuit.hpp"
#include "rnsnet/hw/prefix_adder.hpp"
#include "rnsnet/hw/residue_gen.hpp"
#include "rnsnet/inference.hpp"
#include "rnsnet/network.hpp"
#include "rnsnet/quantize.hpp"
#include "rnsnet/rns_core.hpp"
#include "rnsnet/selftest.hpp"
#include "rnsnet/tensor.hpp"
