//! Small numerical kernels: adaptive Gauss-Kronrod quadrature, bracketed
//! root finding and Gauss-Legendre rules.

pub mod legendre;
pub mod quad;
pub mod roots;
