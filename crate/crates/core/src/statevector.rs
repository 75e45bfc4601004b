//! Dense `2^n`-amplitude simulator. Basis index bit `q-1` holds qubit `q`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::majorana::{i_pow, FermionObservable, MajoranaString, PauliString};
use crate::matchgate::{synthesize_unitary, BrickworkCircuit, GateUnitary};

pub const MAX_DENSE_QUBITS: usize = 14;

const DUMP_MAGIC: &[u8; 8] = b"ADFCSSV1";

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("qubit count must be positive".into()));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

pub fn bits_to_index(b: &[bool]) -> usize {
    b.iter().enumerate().fold(0, |acc, (q, &bit)| acc | (bit as usize) << q)
}

pub fn index_to_bits(n: usize, idx: usize) -> Vec<bool> {
    (0..n).map(|q| idx >> q & 1 == 1).collect()
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis_index(n, 0)
    }

    pub fn basis_index(n: usize, idx: usize) -> Result<Self> {
        check_n(n)?;
        if idx >> n != 0 {
            return Err(Error::InvalidArgument(format!("basis index {idx} out of range for n = {n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn basis(b: &[bool]) -> Result<Self> {
        Self::basis_index(b.len(), bits_to_index(b))
    }

    /// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_n(n)?;
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for n = {n}", amps.len())));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a two-qubit unitary to qubits `(qubit, qubit+1)`. The local basis
    /// index is `b_qubit + 2 b_{qubit+1}`.
    pub fn apply_two_qubit(&mut self, qubit: usize, u: &GateUnitary) {
        assert!(qubit >= 1 && qubit < self.n, "gate position out of range");
        let lo = 1usize << (qubit - 1);
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = u[(r, c)];
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let cross = [m[0][1], m[0][2], m[3][1], m[3][2], m[1][0], m[1][3], m[2][0], m[2][3]];
        let diag = [m[0][0], m[0][3], m[3][0], m[3][3], m[1][1], m[1][2], m[2][1], m[2][2]];
        // Each chunk of 4·lo amplitudes splits into four runs of length lo
        // holding local basis states 0..4 of the pair.
        let runs = self.amps.chunks_exact_mut(4 * lo).map(|chunk| {
            let (r01, r23) = chunk.split_at_mut(2 * lo);
            let (r0, r1) = r01.split_at_mut(lo);
            let (r2, r3) = r23.split_at_mut(lo);
            (r0, r1, r2, r3)
        });
        // matchgates preserve or flip the parity of the pair, so half of the
        // entries vanish exactly
        if cross.iter().all(|&x| x == zero) {
            for (r0, r1, r2, r3) in runs {
                for (((a0, a1), a2), a3) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()).zip(r3.iter_mut()) {
                    let (v0, v1, v2, v3) = (*a0, *a1, *a2, *a3);
                    *a0 = m[0][0] * v0 + m[0][3] * v3;
                    *a3 = m[3][0] * v0 + m[3][3] * v3;
                    *a1 = m[1][1] * v1 + m[1][2] * v2;
                    *a2 = m[2][1] * v1 + m[2][2] * v2;
                }
            }
        } else if diag.iter().all(|&x| x == zero) {
            for (r0, r1, r2, r3) in runs {
                for (((a0, a1), a2), a3) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()).zip(r3.iter_mut()) {
                    let (v0, v1, v2, v3) = (*a0, *a1, *a2, *a3);
                    *a0 = m[0][1] * v1 + m[0][2] * v2;
                    *a3 = m[3][1] * v1 + m[3][2] * v2;
                    *a1 = m[1][0] * v0 + m[1][3] * v3;
                    *a2 = m[2][0] * v0 + m[2][3] * v3;
                }
            }
        } else {
            for (r0, r1, r2, r3) in runs {
                for (((a0, a1), a2), a3) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()).zip(r3.iter_mut()) {
                    let v = [*a0, *a1, *a2, *a3];
                    let row = |r: usize| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
                    (*a0, *a1, *a2, *a3) = (row(0), row(1), row(2), row(3));
                }
            }
        }
    }

    /// `ψ ← U ψ` with layer 1 applied first.
    pub fn apply_circuit(&mut self, c: &BrickworkCircuit) -> Result<()> {
        if c.n() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: c.n() });
        }
        for layer in c.layers() {
            for g in layer {
                self.apply_two_qubit(g.qubit, &synthesize_unitary(&g.block));
            }
        }
        Ok(())
    }

    pub fn evolved(&self, c: &BrickworkCircuit) -> Result<Self> {
        let mut out = self.clone();
        out.apply_circuit(c)?;
        Ok(out)
    }

    /// Born-rule sample of a basis index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    pub fn sample_outcome<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        index_to_bits(self.n, self.sample_index(rng))
    }

    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        if p.n() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: p.n() });
        }
        let (x, z, ph) = p.xz_masks();
        let (x, z) = (x as usize, z as usize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, a) in self.amps.iter().enumerate() {
            let t = self.amps[y ^ x].conj() * a;
            if (z & y).count_ones() & 1 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        Ok(acc * i_pow(ph as i64))
    }

    /// `⟨ψ|γ_S|ψ⟩`; the string's coefficient is ignored.
    pub fn expectation(&self, s: &MajoranaString) -> Result<Complex64> {
        if s.n() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: s.n() });
        }
        self.expectation_pauli(&s.jordan_wigner())
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn observable_expectation(&self, h: &FermionObservable) -> Result<Complex64> {
        h.terms().iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.coefficient() * self.expectation(t)?)
        })
    }

    /// Binary dump: 8-byte magic `ADFCSSV1`, `n` as little-endian u32, then
    /// `2^n` pairs of little-endian f64 `(re, im)`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::InvalidArgument("not a state-vector dump".into()));
        }
        let mut nb = [0u8; 4];
        r.read_exact(&mut nb)?;
        let n = u32::from_le_bytes(nb) as usize;
        check_n(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        let mut buf = [0u8; 16];
        for _ in 0..1usize << n {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Self::from_amplitudes(n, amps)
    }
}
