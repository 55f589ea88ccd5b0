//! The subspace-noise channel CD(m, ε).
//!
//! Each use draws a uniform noise subspace `V` of dimension `round(εm)` and a
//! uniform `z ∈ V`, outputs `y = x + z`, and reveals `V` to the receiver. Noise is
//! independent across channel uses.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::subspace::{AffineSubspace, Subspace};

/// Normalized capacity `1 − ε`.
pub fn capacity(epsilon: f64) -> Result<f64> {
    check_rate(epsilon)?;
    Ok(1.0 - epsilon)
}

fn check_rate(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("noise rate {epsilon} is outside [0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    field: Field,
    m: usize,
    epsilon: f64,
    noise_dim: usize,
}

impl ChannelSpec {
    /// `noise_dim = floor(ε·m + 1/2)`.
    pub fn new(field: Field, m: usize, epsilon: f64) -> Result<ChannelSpec> {
        check_rate(epsilon)?;
        if m == 0 {
            return Err(Error::Parameter("symbol dimension m must be positive".into()));
        }
        let noise_dim = ((epsilon * m as f64 + 0.5).floor() as usize).min(m);
        Ok(ChannelSpec {
            field,
            m,
            epsilon,
            noise_dim,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    /// Whether `ε·m` is an integer (up to rounding noise), i.e. no rounding was needed.
    pub fn is_integral(&self) -> bool {
        (self.epsilon * self.m as f64 - self.noise_dim as f64).abs() < 1e-9
    }

    pub fn transmit<R: Rng + ?Sized>(&self, x: &[Elem], rng: &mut R) -> Result<ChannelOutput> {
        if x.len() != self.m {
            return Err(Error::Shape(format!(
                "input symbol of length {}, channel dimension {}",
                x.len(),
                self.m
            )));
        }
        let noise_space = Subspace::random(self.field, self.m, self.noise_dim, rng)?;
        let z = noise_space.random_element(rng);
        let y = self.field.add_vec(x, &z);
        Ok(ChannelOutput { y, noise_space })
    }

    /// Transmits each symbol of a word independently.
    pub fn transmit_word<R: Rng + ?Sized>(
        &self,
        word: &[Vec<Elem>],
        rng: &mut R,
    ) -> Result<Vec<ChannelOutput>> {
        word.iter().map(|x| self.transmit(x, rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelOutput {
    pub y: Vec<Elem>,
    pub noise_space: Subspace,
}

impl ChannelOutput {
    /// The coset `y − V` of inputs compatible with the observation.
    pub fn received_affine(&self) -> AffineSubspace {
        // -V = V, so y − V = y + V
        AffineSubspace::new(self.y.clone(), self.noise_space.clone())
            .expect("channel output dimensions agree")
    }
}
