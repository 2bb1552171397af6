//! Smith normal form over the integers with both row transforms tracked.
//!
//! For an `r x c` matrix `m` the decomposition satisfies `p * m * q = s`
//! where `s` is diagonal with `s[0] | s[1] | ...` (zeros last) and `p`, `q`
//! are unimodular. `p_inv` is kept alongside `p` because quotient maps need
//! both directions.

pub type IntMatrix = Vec<Vec<i128>>;

#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i128>,
    pub p: IntMatrix,
    pub p_inv: IntMatrix,
    pub q: IntMatrix,
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| row[t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

struct Work {
    m: IntMatrix,
    p: IntMatrix,
    p_inv: IntMatrix,
    q: IntMatrix,
    rows: usize,
    cols: usize,
}

impl Work {
    // row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        for k in 0..self.cols {
            let v = self.m[j][k];
            self.m[i][k] += c * v;
        }
        for k in 0..self.rows {
            let v = self.p[j][k];
            self.p[i][k] += c * v;
        }
        // inverse op applied on the right: col_j -= c * col_i
        for k in 0..self.rows {
            let v = self.p_inv[k][i];
            self.p_inv[k][j] -= c * v;
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.m.swap(i, j);
        self.p.swap(i, j);
        for row in &mut self.p_inv {
            row.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.m[i] {
            *v = -*v;
        }
        for v in &mut self.p[i] {
            *v = -*v;
        }
        for row in &mut self.p_inv {
            row[i] = -row[i];
        }
    }

    // col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        for k in 0..self.rows {
            let v = self.m[k][j];
            self.m[k][i] += c * v;
        }
        for k in 0..self.cols {
            let v = self.q[k][j];
            self.q[k][i] += c * v;
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.m {
            row.swap(i, j);
        }
        for row in &mut self.q {
            row.swap(i, j);
        }
    }

    fn smallest_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let v = self.m[i][j].abs();
                if v != 0 && best.is_none_or(|(bi, bj)| v < self.m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

pub fn smith_normal_form(m: &IntMatrix, cols: usize) -> Smith {
    let rows = m.len();
    let mut w = Work {
        m: m.clone(),
        p: identity(rows),
        p_inv: identity(rows),
        q: identity(cols),
        rows,
        cols,
    };
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = w.smallest_nonzero(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let q = w.m[i][t].div_euclid(w.m[t][t]);
                w.add_row(i, t, -q);
                if w.m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = w.m[t][j].div_euclid(w.m[t][t]);
                w.add_col(j, t, -q);
                if w.m[t][j] != 0 {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    let v = w.m[i][t].abs();
                    if v != 0 && v < w.m[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let v = w.m[t][j].abs();
                    if v != 0 && v < w.m[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // divisibility of the remaining block by the pivot
            let pivot = w.m[t][t];
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| w.m[i][j] % pivot != 0));
            match offender {
                Some(i) => w.add_row(t, i, 1),
                None => break,
            }
        }
        if w.m[t][t] < 0 {
            w.negate_row(t);
        }
        t += 1;
    }
    let diag = (0..steps).map(|i| w.m[i][i]).collect();
    Smith {
        diag,
        p: w.p,
        p_inv: w.p_inv,
        q: w.q,
    }
}
