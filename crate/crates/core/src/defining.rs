//! Which family of slicing maps to use.

use crate::error::{Error, Result};

/// The slicing map a distance computation projects through.
///
/// `Linear` is plain inner-product slicing. `Polynomial` lifts points to all
/// monomials of an odd total degree before slicing; degree 1 reduces to
/// `Linear`. `Neural` pushes points through a stack of random square
/// matrices; zero layers reduces to `Linear`. `Circular` measures distance
/// to a scaled direction point, `|x - t theta|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefiningFunction {
    Linear,
    Polynomial { degree: u32 },
    Neural { layers: u32 },
    Circular { radius: f64 },
}

impl DefiningFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DefiningFunction::Linear | DefiningFunction::Neural { .. } => Ok(()),
            DefiningFunction::Polynomial { degree } => {
                if degree >= 1 && degree % 2 == 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "polynomial degree must be odd and at least 1, got {degree}"
                    )))
                }
            }
            DefiningFunction::Circular { radius } => {
                if radius.is_finite() && radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "circular radius must be finite and positive, got {radius}"
                    )))
                }
            }
        }
    }
}
