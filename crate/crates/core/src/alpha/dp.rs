//! Exact `α_{S,d}` by propagating a probability distribution over Majorana
//! subsets through the brickwork.
//!
//! Averaging `|⟨0|U γ_S U†|0⟩|²` over a Haar O(4) gate on modes `M` sends
//! `S` to `(S \ M) ∪ A'` with `A'` uniform among subsets of `M` of size
//! `|S ∩ M|`. After `d` layers, `α` is the mass sitting on paired sets.

use crate::alpha::tensor::{label_to_subset, LocalTwirlTensor};
use crate::alpha::{binomial, AlphaMethod, AlphaResult};
use crate::error::{Error, Result};
use crate::majorana::MajoranaString;
use crate::matchgate::layer_positions;

pub const PRUNE_THRESHOLD: f64 = 1e-15;

const ODD_MODES: u64 = 0x5555_5555_5555_5555;
const EVEN_MODES: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// True when the subset mask is a union of pairs `{2j-1, 2j}`.
pub fn mask_is_paired(mask: u64) -> bool {
    (mask & ODD_MODES) << 1 == mask & EVEN_MODES
}

/// Transition weights of one gate between subsets of its four local modes.
#[derive(Clone, Debug)]
pub struct GateKernel {
    moves: [Vec<(u8, f64)>; 16],
}

impl GateKernel {
    /// Uniform redistribution within each locality sector.
    pub fn uniform() -> Self {
        let moves = std::array::from_fn(|a: usize| {
            let c = (a as u8).count_ones();
            let w = 1.0 / binomial(4, c as usize);
            (0u8..16).filter(|b| b.count_ones() == c).map(|b| (b, w)).collect()
        });
        Self { moves }
    }

    /// Kernel read off a (possibly perturbed) Pauli-basis twirl tensor,
    /// with `t[out][in]` indexed as in [`crate::alpha::tensor::PAULI_LABELS`].
    pub fn from_tensor(t: &[[f64; 16]; 16]) -> Self {
        let subset: Vec<u8> = (0..16).map(label_to_subset).collect();
        let mut moves: [Vec<(u8, f64)>; 16] = Default::default();
        for inp in 0..16 {
            for out in 0..16 {
                if t[out][inp] != 0.0 {
                    moves[subset[inp] as usize].push((subset[out], t[out][inp]));
                }
            }
        }
        for m in moves.iter_mut() {
            m.sort_by_key(|&(b, _)| b);
        }
        Self { moves }
    }

    pub fn from_exact(t: &LocalTwirlTensor) -> Self {
        Self::from_tensor(&t.to_f64())
    }

    pub fn weight(&self, out: u8, inp: u8) -> f64 {
        self.moves[inp as usize].iter().find(|&&(b, _)| b == out).map_or(0.0, |&(_, w)| w)
    }
}

/// Sparse distribution over subsets of `1..=2n`, stored as sorted `(mask, mass)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetDistribution {
    n: usize,
    k: usize,
    mass: Vec<(u64, f64)>,
    pruned: f64,
}

impl SubsetDistribution {
    pub fn point(s: &MajoranaString) -> Result<Self> {
        if 2 * s.n() > 64 {
            return Err(Error::InvalidArgument(format!("subset DP supports n <= 32, got {}", s.n())));
        }
        Ok(Self { n: s.n(), k: s.locality(), mass: vec![(s.mask(), 1.0)], pruned: 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().map(|&(_, p)| p).sum()
    }

    pub fn pruned_mass(&self) -> f64 {
        self.pruned
    }

    pub fn paired_mass(&self) -> f64 {
        self.mass.iter().filter(|&&(m, _)| mask_is_paired(m)).map(|&(_, p)| p).sum()
    }

    /// Subsets as 1-based index lists with their masses.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.mass.iter().map(|&(m, p)| ((1..=64).filter(|i| m >> (i - 1) & 1 == 1).collect(), p))
    }

    pub fn raw(&self) -> &[(u64, f64)] {
        &self.mass
    }

    /// Applies the gate on qubits `(qubit, qubit+1)`, i.e. modes `2q-1 ..= 2q+2`.
    pub fn apply_gate(&mut self, qubit: usize, kernel: &GateKernel) {
        let shift = 2 * (qubit - 1);
        let local = 0xFu64 << shift;
        let mut next: Vec<(u64, f64)> = Vec::with_capacity(self.mass.len() * 4);
        for &(m, p) in &self.mass {
            let a = ((m & local) >> shift) as usize;
            let rest = m & !local;
            for &(b, w) in &kernel.moves[a] {
                next.push((rest | (b as u64) << shift, p * w));
            }
        }
        next.sort_by_key(|&(m, _)| m);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(next.len());
        for (m, p) in next {
            match merged.last_mut() {
                Some(last) if last.0 == m => last.1 += p,
                _ => merged.push((m, p)),
            }
        }
        let mut dropped = 0.0;
        merged.retain(|&(_, p)| {
            if p < PRUNE_THRESHOLD {
                dropped += p;
                false
            } else {
                true
            }
        });
        self.pruned += dropped;
        debug_assert!(merged.iter().all(|&(m, _)| m.count_ones() as usize == self.k));
        self.mass = merged;
    }

    /// Applies brickwork layer `layer` (1-based).
    pub fn apply_layer(&mut self, layer: usize, kernel: &GateKernel) {
        for q in layer_positions(self.n, layer) {
            self.apply_gate(q, kernel);
        }
    }
}

fn check_inputs(n: usize, s: &MajoranaString) -> Result<()> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::OddQubitCount(n));
    }
    if s.n() != n {
        return Err(Error::QubitMismatch { expected: n, got: s.n() });
    }
    if s.locality() % 2 == 1 {
        return Err(Error::OddLocality(s.locality()));
    }
    Ok(())
}

pub fn alpha_exact_dp(n: usize, d: usize, s: &MajoranaString) -> Result<AlphaResult> {
    check_inputs(n, s)?;
    let kernel = GateKernel::uniform();
    let mut dist = SubsetDistribution::point(s)?;
    for layer in 1..=d {
        dist.apply_layer(layer, &kernel);
    }
    Ok(AlphaResult {
        value: dist.paired_mass(),
        method: AlphaMethod::ExactDp,
        stderr: None,
        pruned_mass: dist.pruned_mass(),
    })
}

/// `α_{S,d}` for every `d` in `0..=d_max`, from a single propagation.
pub fn alpha_dp_curve(n: usize, s: &MajoranaString, d_max: usize) -> Result<Vec<f64>> {
    alpha_dp_curve_with_kernel(n, s, d_max, &GateKernel::uniform())
}

pub fn alpha_dp_curve_with_kernel(
    n: usize,
    s: &MajoranaString,
    d_max: usize,
    kernel: &GateKernel,
) -> Result<Vec<f64>> {
    check_inputs(n, s)?;
    let mut dist = SubsetDistribution::point(s)?;
    let mut out = Vec::with_capacity(d_max + 1);
    out.push(dist.paired_mass());
    for layer in 1..=d_max {
        dist.apply_layer(layer, kernel);
        out.push(dist.paired_mass());
    }
    Ok(out)
}
