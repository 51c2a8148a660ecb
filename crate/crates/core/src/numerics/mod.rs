//! Small numerical building blocks shared by the solver modules.

pub mod banded;
pub mod interp;
pub mod quadrature;
pub mod roots;
