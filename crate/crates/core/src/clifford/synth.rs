use super::circuit::{conjugate_ps, CliffordCircuit};
use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::pauli::{CommutationMode, PauliString};

fn inv_mod(a: i64, p: i64) -> i64 {
    // p is prime, so a^{p-2} is the inverse
    let mut result = 1i64;
    let mut base = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Symplectic rows `(x | z)` over `F_p` for one prime block, plus the gates
/// emitted so far.
struct Block {
    p: i64,
    qudits: Vec<usize>,
    rows: Vec<Vec<i64>>,
    gates: Vec<Gate>,
}

impl Block {
    fn n(&self) -> usize {
        self.qudits.len()
    }

    fn x(&self, row: usize, k: usize) -> i64 {
        self.rows[row][k]
    }

    fn z(&self, row: usize, k: usize) -> i64 {
        self.rows[row][self.n() + k]
    }

    fn emit(&mut self, kind: GateKind, local: &[usize]) {
        let n = self.n();
        let p = self.p;
        for row in &mut self.rows {
            match kind {
                GateKind::H => {
                    let (r, s) = (row[local[0]], row[n + local[0]]);
                    row[local[0]] = (-s).rem_euclid(p);
                    row[n + local[0]] = r;
                }
                GateKind::HInv => {
                    let (r, s) = (row[local[0]], row[n + local[0]]);
                    row[local[0]] = s;
                    row[n + local[0]] = (-r).rem_euclid(p);
                }
                GateKind::S => row[n + local[0]] = (row[n + local[0]] + row[local[0]]) % p,
                GateKind::SInv => row[n + local[0]] = (row[n + local[0]] - row[local[0]]).rem_euclid(p),
                GateKind::Csum => {
                    let (c, t) = (local[0], local[1]);
                    row[t] = (row[t] + row[c]) % p;
                    row[n + c] = (row[n + c] - row[n + t]).rem_euclid(p);
                }
                GateKind::X | GateKind::Z => {}
            }
        }
        let d = p as u32;
        let qudits: Vec<usize> = local.iter().map(|&k| self.qudits[k]).collect();
        self.gates.push(Gate {
            kind,
            qudits,
            dim: d,
        });
    }

    /// `S^m`, using whichever of `S` or `S^{-1}` needs fewer gates.
    fn phase_power(&mut self, k: usize, m: i64) {
        let m = m.rem_euclid(self.p);
        if m == 0 {
            return;
        }
        let (kind, count) = if m <= self.p - m {
            (GateKind::S, m)
        } else {
            (GateKind::SInv, self.p - m)
        };
        for _ in 0..count {
            self.emit(kind, &[k]);
        }
    }

    /// Reduced row echelon form on the X columns; returns pivot `(row, column)` pairs.
    fn rref_x(&mut self) -> Vec<(usize, usize)> {
        let n = self.n();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..n {
            let Some(found) = (next..self.rows.len()).find(|&r| self.rows[r][col] != 0) else {
                continue;
            };
            self.rows.swap(next, found);
            let inv = inv_mod(self.rows[next][col], p);
            for v in &mut self.rows[next] {
                *v = *v * inv % p;
            }
            for r in 0..self.rows.len() {
                if r != next && self.rows[r][col] != 0 {
                    let f = self.rows[r][col];
                    for k in 0..2 * n {
                        self.rows[r][k] = (self.rows[r][k] - f * self.rows[next][k]).rem_euclid(p);
                    }
                }
            }
            pivots.push((next, col));
            next += 1;
        }
        pivots
    }

    fn eliminate(&mut self) {
        let n = self.n();
        let p = self.p;
        let pivots = self.rref_x();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        // spread each pivot's X onto the remaining columns back into the pivot
        for &(row, c) in &pivots {
            for t in 0..n {
                if pivot_cols.contains(&t) {
                    continue;
                }
                let x = self.x(row, t);
                for _ in 0..(p - x) % p {
                    self.emit(GateKind::Csum, &[c, t]);
                }
            }
        }
        // clear the Z entry on each pivot
        for &(row, c) in &pivots {
            let a = self.z(row, c);
            self.phase_power(c, -a);
        }
        // pivot-pivot Z entries are symmetric by commutation; clear them with CZ
        for (a, &(row_i, _)) in pivots.iter().enumerate() {
            for &(_, cj) in &pivots[a + 1..] {
                let b = self.z(row_i, cj);
                let k = (p - b) % p;
                if k == 0 {
                    continue;
                }
                let ci = pivots[a].1;
                self.emit(GateKind::HInv, &[cj]);
                for _ in 0..k {
                    self.emit(GateKind::Csum, &[ci, cj]);
                }
                self.emit(GateKind::H, &[cj]);
            }
        }
        for &c in &pivot_cols {
            self.emit(GateKind::H, &[c]);
        }
    }
}

/// Synthesizes a Clifford circuit that maps every string of the clique, and
/// every pairwise product, onto a diagonal string.
///
/// Bitwise mode uses one local rotation per qudit. General mode runs
/// symplectic elimination independently on each block of equal prime
/// dimension.
pub fn diagonalize_clique(strings: &[PauliString], mode: CommutationMode) -> Result<CliffordCircuit> {
    let first = strings.first().ok_or(Error::Empty("clique"))?;
    let register = first.register().clone();
    for (i, a) in strings.iter().enumerate() {
        for b in &strings[i + 1..] {
            if !a.commutes(b, mode)? {
                return Err(Error::NotCommuting(format!("{a} and {b}")));
            }
        }
    }
    let mut gates = Vec::new();
    match mode {
        CommutationMode::Bitwise => {
            for j in 0..register.len() {
                let p = register.dim(j) as i64;
                let Some(&(a, b)) = strings.iter().map(|s| &s.exps()[j]).find(|&&(r, _)| r != 0) else {
                    continue;
                };
                let mut block = Block {
                    p,
                    qudits: vec![j],
                    rows: vec![vec![a as i64, b as i64]],
                    gates: Vec::new(),
                };
                let m = -(b as i64) * inv_mod(a as i64, p);
                block.phase_power(0, m);
                block.emit(GateKind::H, &[0]);
                gates.extend(block.gates);
            }
        }
        CommutationMode::General => {
            for prime in register.primes() {
                let qudits = register.block(prime);
                let n = qudits.len();
                let rows: Vec<Vec<i64>> = strings
                    .iter()
                    .map(|s| {
                        let mut v = vec![0i64; 2 * n];
                        for (k, &q) in qudits.iter().enumerate() {
                            v[k] = s.exps()[q].0 as i64;
                            v[n + k] = s.exps()[q].1 as i64;
                        }
                        v
                    })
                    .collect();
                let mut block = Block {
                    p: prime as i64,
                    qudits,
                    rows,
                    gates: Vec::new(),
                };
                block.eliminate();
                gates.extend(block.gates);
            }
        }
    }
    let circuit = CliffordCircuit::new(&register, gates)?;
    for (i, a) in strings.iter().enumerate() {
        check_diagonal(&circuit, a)?;
        for b in &strings[i + 1..] {
            check_diagonal(&circuit, &a.dagger().multiply(b)?)?;
        }
    }
    Ok(circuit)
}

fn check_diagonal(circuit: &CliffordCircuit, p: &PauliString) -> Result<()> {
    let image = conjugate_ps(circuit, p)?;
    if !image.is_diagonal() {
        return Err(Error::NotDiagonal(format!("{p} maps to {image}")));
    }
    Ok(())
}
