use std::f64::consts::PI;

use nalgebra::{DMatrix, DVectorView};

use crate::error::{Error, Result};
use crate::C64;

/// Analog beam codebook: an `M x B` matrix whose columns are the codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    beams: DMatrix<C64>,
}

impl Codebook {
    /// Wraps an arbitrary set of beams; every column must have unit norm.
    pub fn from_beams(beams: DMatrix<C64>) -> Result<Self> {
        if beams.nrows() == 0 || beams.ncols() == 0 {
            return Err(Error::InvalidConfig("empty codebook".into()));
        }
        for (b, col) in beams.column_iter().enumerate() {
            if (col.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!("codeword {b} is not unit norm")));
            }
        }
        Ok(Self { beams })
    }

    /// DFT grid with `beams` columns over `antennas` elements. With
    /// `beams == antennas` this is the unitary DFT matrix; larger values
    /// oversample the angular grid.
    pub fn dft(antennas: usize, beams: usize) -> Result<Self> {
        if antennas == 0 || beams == 0 {
            return Err(Error::InvalidGeometry("DFT codebook needs M >= 1 and B >= 1".into()));
        }
        let scale = 1.0 / (antennas as f64).sqrt();
        let beams = DMatrix::from_fn(antennas, beams, |x, y| {
            // exponent reduced mod B keeps the phase argument small for large M
            let e = (x * y) % beams;
            C64::from_polar(scale, -2.0 * PI * e as f64 / beams as f64)
        });
        Ok(Self { beams })
    }

    pub fn antennas(&self) -> usize {
        self.beams.nrows()
    }

    pub fn len(&self) -> usize {
        self.beams.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.ncols() == 0
    }

    pub fn beam(&self, b: usize) -> DVectorView<'_, C64> {
        self.beams.column(b)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.beams
    }

    /// Analog precoder built from the given beam indices, one column each.
    pub fn select(&self, indices: &[usize]) -> DMatrix<C64> {
        self.beams.select_columns(indices)
    }

    /// `B x B` matrix of codeword inner products `u_a^H u_b`.
    pub fn gram(&self) -> DMatrix<C64> {
        self.beams.ad_mul(&self.beams)
    }
}

/// Square DFT codebook (`B = M`).
pub fn dft_codebook(antennas: usize) -> Result<Codebook> {
    Codebook::dft(antennas, antennas)
}
