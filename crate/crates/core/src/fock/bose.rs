//! Bose second quantization on the symmetric Fock space truncated at `max_particles`.

use crate::linalg::*;

/// Occupation-number basis of `sum_{k <= K} S^k(C^n)`, ordered by particle number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoseFock {
    pub n: usize,
    pub max_particles: usize,
    pub states: Vec<Vec<usize>>,
}

fn compositions(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() + 1 == n {
        prefix.push(k);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for m in (0..=k).rev() {
        prefix.push(m);
        compositions(n, k - m, prefix, out);
        prefix.pop();
    }
}

impl BoseFock {
    pub fn new(n: usize, max_particles: usize) -> Self {
        assert!(n > 0);
        let mut states = Vec::new();
        for k in 0..=max_particles {
            compositions(n, k, &mut Vec::new(), &mut states);
        }
        Self { n, max_particles, states }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn particle_number(&self, idx: usize) -> usize {
        self.states[idx].iter().sum()
    }
}

/// Ryser's formula.
fn permanent(a: &[C64], k: usize) -> C64 {
    if k == 0 {
        return c(1.0, 0.0);
    }
    let mut total = c(0.0, 0.0);
    for mask in 1usize..(1 << k) {
        let mut prod = c(1.0, 0.0);
        for i in 0..k {
            let row: C64 = (0..k).filter(|j| mask & (1 << j) != 0).map(|j| a[i * k + j]).sum();
            prod *= row;
        }
        let sign = if (k - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

fn expand(occ: &[usize]) -> Vec<usize> {
    occ.iter().enumerate().flat_map(|(j, &m)| std::iter::repeat(j).take(m)).collect()
}

fn factorial_product(occ: &[usize]) -> f64 {
    occ.iter().map(|&m| (1..=m).map(|x| x as f64).product::<f64>()).product()
}

/// `Gamma_+(T)`: `perm T[rows(m'), cols(m)] / sqrt(m'! m!)` on each sector.
pub fn gamma_plus(fock: &BoseFock, t: &CMat) -> CMat {
    assert_eq!(t.dim(), (fock.n, fock.n));
    let d = fock.dim();
    let mut out = CMat::zeros((d, d));
    for (s, occ_s) in fock.states.iter().enumerate() {
        let cols = expand(occ_s);
        let k = cols.len();
        for (r, occ_r) in fock.states.iter().enumerate() {
            if fock.particle_number(r) != k {
                continue;
            }
            let rows = expand(occ_r);
            let sub: Vec<C64> = rows.iter().flat_map(|&i| cols.iter().map(move |&j| t[[i, j]])).collect();
            out[[r, s]] = permanent(&sub, k) / (factorial_product(occ_r) * factorial_product(occ_s)).sqrt();
        }
    }
    out
}
