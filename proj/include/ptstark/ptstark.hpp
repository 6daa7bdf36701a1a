#pragma once

// Spectra of PT-symmetric Hamiltonians p^2/2 + V(r) + i g z for harmonic,
// Coulomb, and linear central potentials: variational matrix pencils over
// Slater bases, complex-symmetric eigensolves, first-order degenerate
// perturbation theory, parabolic separation for hydrogen, and
// exceptional-point scans over the coupling g.

#include "ptstark/angular.hpp"
#include "ptstark/errors.hpp"
#include "ptstark/hydrogen.hpp"
#include "ptstark/linalg.hpp"
#include "ptstark/oscillator.hpp"
#include "ptstark/perturbation.hpp"
#include "ptstark/run.hpp"
#include "ptstark/scan.hpp"
#include "ptstark/slater.hpp"
#include "ptstark/solve.hpp"
#include "ptstark/version.hpp"
