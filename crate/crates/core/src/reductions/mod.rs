//! Hardness gadgets and the solution translations in both directions.

mod sat;
mod x3c;

pub use sat::{build_3sat_gadget, SatGadget};
pub use x3c::{build_x3c_gadget, X3CGadget};
