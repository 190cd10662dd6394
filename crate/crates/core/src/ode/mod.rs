//! The coupled equation, the fourth-order equation, its indicial exponents
//! and the connection constants.

mod constants;
mod coupled;
mod fd;
mod indicial;
mod ode4;

pub use constants::*;
pub use coupled::*;
pub use indicial::*;
pub use ode4::*;

pub(crate) use fd::derivatives;
