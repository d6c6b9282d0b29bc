#pragma once

#include <cstddef>

namespace equipart::kernels::scalar {

void affine(const double* const* coords, std::size_t dim, const double* grad, double offset, std::size_t n,
            double* out);
void logistic(const double* in, double shift, double inv_tau, std::size_t n, double* out);
void softmax(double* const* rows, std::size_t r, double inv_tau, std::size_t n);
void exp(const double* in, std::size_t n, double* out);

}  // namespace equipart::kernels::scalar

namespace equipart::kernels::avx2 {

void affine(const double* const* coords, std::size_t dim, const double* grad, double offset, std::size_t n,
            double* out);
void logistic(const double* in, double shift, double inv_tau, std::size_t n, double* out);
void softmax(double* const* rows, std::size_t r, double inv_tau, std::size_t n);
void exp(const double* in, std::size_t n, double* out);

}  // namespace equipart::kernels::avx2
