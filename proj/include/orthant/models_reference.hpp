#pragma once

#include "orthant/models.hpp"

// Serial, formula-by-formula evaluations of the three models. They share no
// code with the blocked OpenMP kernels in ModelInstance and exist to check
// them (tests) and to time them (bench).
namespace orthant::reference {

double log_lik(const ModelInstance& model, const Vector& theta);
Vector grad_log_lik(const ModelInstance& model, const Vector& theta);
Matrix hess_log_lik(const ModelInstance& model, const Vector& theta);

}  // namespace orthant::reference
