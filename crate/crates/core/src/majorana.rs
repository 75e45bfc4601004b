//! Majorana index sets, their Jordan–Wigner Pauli form, and fermionic observables.
//!
//! Indices are 1-based: for `n` qubits the modes are `1..=2n`, and
//! `γ_{2j-1} = Z_1⋯Z_{j-1} X_j`, `γ_{2j} = Z_1⋯Z_{j-1} Y_j`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i^p` for `p` taken mod 4.
pub fn i_pow(p: i64) -> Complex64 {
    match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

/// A product `c · γ_{i_1} γ_{i_2} ⋯ γ_{i_k}` with strictly increasing indices.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaString {
    n: usize,
    indices: Vec<usize>,
    coefficient: Complex64,
}

impl MajoranaString {
    pub fn new(n: usize, indices: impl Into<Vec<usize>>) -> Result<Self> {
        Self::with_coefficient(n, indices, Complex64::new(1.0, 0.0))
    }

    pub fn with_coefficient(
        n: usize,
        indices: impl Into<Vec<usize>>,
        coefficient: Complex64,
    ) -> Result<Self> {
        let indices = indices.into();
        if n == 0 {
            return Err(Error::InvalidArgument("qubit count must be positive".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > 2 * n) {
            return Err(Error::InvalidIndices(format!(
                "index {bad} outside 1..={} for n = {n}",
                2 * n
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndices(format!(
                "{indices:?} is not strictly increasing"
            )));
        }
        Ok(Self { n, indices, coefficient })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn locality(&self) -> usize {
        self.indices.len()
    }

    /// Bitmask with bit `μ-1` set for every mode `μ ∈ S`. Requires `2n ≤ 64`.
    pub fn mask(&self) -> u64 {
        assert!(2 * self.n <= 64, "mask needs 2n <= 64");
        self.indices.iter().fold(0, |m, &i| m | 1 << (i - 1))
    }

    /// Largest gap between consecutive indices, 0 for fewer than two.
    pub fn interaction_distance(&self) -> usize {
        self.indices.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Largest gap inside the consecutive pairs `(i_1,i_2), (i_3,i_4), …`.
    pub fn near_distance(&self) -> Result<usize> {
        if self.locality() % 2 == 1 {
            return Err(Error::OddLocality(self.locality()));
        }
        Ok(self.indices.chunks(2).map(|p| p[1] - p[0]).max().unwrap_or(0))
    }

    /// True when `S` is a union of mode pairs `{2j-1, 2j}`.
    pub fn is_paired(&self) -> bool {
        self.indices.len() % 2 == 0
            && self.indices.chunks(2).all(|p| p[0] % 2 == 1 && p[1] == p[0] + 1)
    }

    /// Whether `c·γ_S` is self-adjoint: `γ_S† = (-1)^{k(k-1)/2} γ_S`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let k = self.locality();
        let sign = if (k * k.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        (self.coefficient.conj() * sign - self.coefficient).norm() <= tol
    }

    /// Pauli form of `γ_S` (the coefficient is not included).
    pub fn jordan_wigner(&self) -> PauliString {
        let n = self.n;
        let mut x = vec![false; n];
        let mut z = vec![false; n];
        // γ_S = i^p X^x Z^z, built left to right
        let mut p: i64 = 0;
        for &mu in &self.indices {
            let j = (mu - 1) / 2;
            let mut gz = vec![false; n];
            gz[..j].iter_mut().for_each(|b| *b = true);
            let mut gp = 0;
            if mu % 2 == 0 {
                gz[j] = true;
                gp = 1;
            }
            // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{z1·x2} X^{x1^x2} Z^{z1^z2}; here x2 = e_j
            if z[j] {
                p += 2;
            }
            p += gp;
            x[j] ^= true;
            for (a, b) in z.iter_mut().zip(&gz) {
                *a ^= *b;
            }
        }
        PauliString::from_xz(&x, &z, p)
    }

    /// `⟨b|γ_S|b⟩` for a computational basis state; `b[j-1]` is the bit of qubit `j`.
    /// The coefficient is not included.
    pub fn vacuum_expectation(&self, b: &[bool]) -> Result<Complex64> {
        if b.len() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: b.len() });
        }
        if !self.is_paired() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.indices.chunks(2).fold(Complex64::new(1.0, 0.0), |acc, pair| {
            let j = pair[1] / 2;
            if b[j - 1] {
                acc * -I
            } else {
                acc * I
            }
        }))
    }

    /// Space-separated index list, e.g. `"1 4"`.
    pub fn label(&self) -> String {
        self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for MajoranaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.label().replace(' ', ","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// `phase · P_1 ⊗ P_2 ⊗ ⋯ ⊗ P_n`, phase in `{1, i, -1, -i}`. Letter 0 is qubit 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: u8,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase_power: i64) -> Self {
        Self { letters, phase: phase_power.rem_euclid(4) as u8 }
    }

    /// Parses letters like `"XYZI"` (qubit 1 first).
    pub fn parse(letters: &str, phase_power: i64) -> Option<Self> {
        let letters = letters.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>()?;
        Some(Self::new(letters, phase_power))
    }

    /// Builds `i^p X^x Z^z` and rewrites every `XZ = -iY`.
    fn from_xz(x: &[bool], z: &[bool], p: i64) -> Self {
        let mut n_y = 0;
        let letters = x
            .iter()
            .zip(z)
            .map(|(&a, &b)| match (a, b) {
                (false, false) => Pauli::I,
                (true, false) => Pauli::X,
                (false, true) => Pauli::Z,
                (true, true) => {
                    n_y += 1;
                    Pauli::Y
                }
            })
            .collect();
        Self::new(letters, p - n_y)
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letters_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }

    /// Exponent `p` of the phase `i^p`.
    pub fn phase_power(&self) -> u8 {
        self.phase
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase as i64)
    }

    /// `(x, z, p)` with `self = i^p X^x Z^z` and bit `q-1` for qubit `q`. Requires `n ≤ 64`.
    pub fn xz_masks(&self) -> (u64, u64, u8) {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut n_y = 0i64;
        for (q, l) in self.letters.iter().enumerate() {
            let (a, b) = l.xz();
            x |= (a as u64) << q;
            z |= (b as u64) << q;
            n_y += (a && b) as i64;
        }
        (x, z, (self.phase as i64 + n_y).rem_euclid(4) as u8)
    }

    /// Dense `2^n × 2^n` matrix; basis index bit `q-1` is qubit `q`.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n();
        let (x, z, p) = self.xz_masks();
        let base = i_pow(p as i64);
        let mut m = DMatrix::zeros(dim, dim);
        for y in 0..dim {
            let sign = if ((z & y as u64).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            m[((y as u64 ^ x) as usize, y)] = base * sign;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ph = ["", "i·", "-", "-i·"][self.phase as usize];
        write!(f, "{ph}{}", self.letters_string())
    }
}

/// `H = Σ_S c_S γ_S` over distinct index sets.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionObservable {
    n: usize,
    terms: Vec<MajoranaString>,
}

impl FermionObservable {
    /// Terms with equal index sets are merged by adding coefficients; first
    /// appearance fixes the order.
    pub fn new(n: usize, terms: Vec<MajoranaString>) -> Result<Self> {
        let mut merged: Vec<MajoranaString> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.n != n {
                return Err(Error::QubitMismatch { expected: n, got: t.n });
            }
            match merged.iter_mut().find(|m| m.indices == t.indices) {
                Some(m) => m.coefficient += t.coefficient,
                None => merged.push(t),
            }
        }
        Ok(Self { n, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[MajoranaString] {
        &self.terms
    }

    pub fn interaction_distance(&self) -> Result<usize> {
        self.terms
            .iter()
            .map(MajoranaString::interaction_distance)
            .max()
            .ok_or(Error::EmptyObservable)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.is_hermitian(tol))
    }

    /// `Σ_S c_S ⟨b|γ_S|b⟩`.
    pub fn basis_expectation(&self, b: &[bool]) -> Result<Complex64> {
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.coefficient * t.vacuum_expectation(b)?)
        })
    }

    /// `Σ_S |c_S|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            m += t.jordan_wigner().to_matrix() * t.coefficient;
        }
        m
    }

    /// Parses one term per line, `re im i1 i2 … ik`; `#` starts a comment.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(err("expected `coeff_re coeff_im i1 ... ik`".into()));
            }
            let re: f64 = fields[0].parse().map_err(|e| err(format!("coefficient: {e}")))?;
            let im: f64 = fields[1].parse().map_err(|e| err(format!("coefficient: {e}")))?;
            let idx = fields[2..]
                .iter()
                .map(|f| f.parse::<usize>().map_err(|e| err(format!("index `{f}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let term = MajoranaString::with_coefficient(n, idx, Complex64::new(re, im))
                .map_err(|e| err(e.to_string()))?;
            terms.push(term);
        }
        if terms.is_empty() {
            return Err(Error::EmptyObservable);
        }
        Self::new(n, terms)
    }

    /// Inverse of [`FermionObservable::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.terms {
            s.push_str(&format!("{:e} {:e}", t.coefficient.re, t.coefficient.im));
            for i in &t.indices {
                s.push_str(&format!(" {i}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Kitaev chain
/// `H = -(iμ/2) Σ_j γ_{2j-1}γ_{2j} + (i/2) Σ_j (ω₊ γ_{2j-1}γ_{2j+2} - ω₋ γ_{2j}γ_{2j+1})`
/// with `ω± = |Δ| ± t`.
pub fn kitaev_chain(n: usize, mu: f64, delta: f64, t: f64) -> Result<FermionObservable> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Kitaev chain needs n >= 2, got {n}")));
    }
    let w_plus = delta.abs() + t;
    let w_minus = delta.abs() - t;
    let mut terms = Vec::with_capacity(3 * n);
    for j in 1..=n {
        terms.push(MajoranaString::with_coefficient(
            n,
            vec![2 * j - 1, 2 * j],
            Complex64::new(0.0, -mu / 2.0),
        )?);
    }
    for j in 1..n {
        terms.push(MajoranaString::with_coefficient(
            n,
            vec![2 * j - 1, 2 * j + 2],
            Complex64::new(0.0, w_plus / 2.0),
        )?);
        terms.push(MajoranaString::with_coefficient(
            n,
            vec![2 * j, 2 * j + 1],
            Complex64::new(0.0, -w_minus / 2.0),
        )?);
    }
    FermionObservable::new(n, terms)
}

/// Dense matrix of the single mode `γ_μ`.
pub fn majorana_matrix(n: usize, mu: usize) -> Result<DMatrix<Complex64>> {
    Ok(MajoranaString::new(n, vec![mu])?.jordan_wigner().to_matrix())
}

/// Iterator over all subsets of `1..=2n` of size `k`, in lexicographic order.
pub fn subsets(two_n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= two_n { Some((1..=k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < two_n - (k - 1 - i) {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}
