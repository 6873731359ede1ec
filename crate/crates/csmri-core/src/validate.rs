//! Input validation helpers used at public API boundaries.

use crate::{ComplexImage, Error, RealImage, Result};

/// Require a square real image and return its side length.
pub fn require_square(img: &RealImage) -> Result<usize> {
    if img.nrows() != img.ncols() {
        return Err(Error::NotSquare {
            rows: img.nrows(),
            cols: img.ncols(),
        });
    }
    Ok(img.nrows())
}

/// Require a square complex array and return its side length.
pub fn require_square_c(img: &ComplexImage) -> Result<usize> {
    if img.nrows() != img.ncols() {
        return Err(Error::NotSquare {
            rows: img.nrows(),
            cols: img.ncols(),
        });
    }
    Ok(img.nrows())
}

/// Require every entry to be finite.
pub fn require_finite(img: &RealImage, context: &str) -> Result<()> {
    if img.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::non_finite(context))
    }
}

/// Require two images to share a shape.
pub fn require_same_shape(a: &RealImage, b: &RealImage, context: &'static str) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected: format!("{:?}", a.dim()),
            got: format!("{:?}", b.dim()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn rejects_rectangular_and_non_finite() {
        let rect = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            require_square(&rect),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));

        let mut img = Array2::<f64>::zeros((2, 2));
        img[[0, 1]] = f64::NAN;
        assert!(matches!(
            require_finite(&img, "test"),
            Err(Error::NonFinite { .. })
        ));
    }
}
