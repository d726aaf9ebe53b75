//! Basis factorization for the simplex engine.
//!
//! The basis is a mix of slack columns (unit vectors) and structural columns.
//! Slack columns are handled by permutation: if the rows whose slack is basic
//! form the set `S` and the structural basic columns the set `J`, then only the
//! square core `A[R, J]` (with `R` the complement of `S`) needs a real
//! factorization. The core is triangularized as far as possible by peeling
//! column singletons and then row singletons; what remains (the nucleus) gets
//! a sparse LU with Markowitz-style threshold pivoting. Later basis changes are applied
//! as product-form eta vectors until the next refactorization.

const PIVOT_TOL: f64 = 1e-9;
/// A singleton pivot must be at least this fraction of the largest entry in
/// its row (column singletons) or column (row singletons).
const SINGLETON_REL_TOL: f64 = 1e-3;
const ETA_DROP: f64 = 1e-14;

struct Eta {
    pos: usize,
    pivot: f64,
    /// Off-pivot entries of the transformed entering column.
    entries: Vec<(usize, f64)>,
}

/// A basis that failed to factor: the listed basis positions hold structural
/// columns that are linearly dependent on the rest, and `free_rows` are rows
/// whose slacks can replace them (same length).
#[derive(Debug)]
pub(crate) struct Singular {
    pub positions: Vec<usize>,
    pub free_rows: Vec<usize>,
}

/// Compressed sparse lines (rows or columns) of the core in local indices.
#[derive(Default)]
struct Lines {
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Lines {
    fn line(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.start[i], self.start[i + 1]);
        self.idx[a..b].iter().copied().zip(self.val[a..b].iter().copied())
    }

    fn len(&self, i: usize) -> usize {
        self.start[i + 1] - self.start[i]
    }

    fn from_triplets(n: usize, trip: &[(usize, usize, f64)]) -> Self {
        let mut start = vec![0; n + 1];
        for &(i, _, _) in trip {
            start[i + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut idx = vec![0; trip.len()];
        let mut val = vec![0.0; trip.len()];
        for &(i, j, v) in trip {
            idx[fill[i]] = j;
            val[fill[i]] = v;
            fill[i] += 1;
        }
        Lines { start, idx, val }
    }
}

/// A pivot `(row slot, core column, value)` taken outside the nucleus.
type Pivot = (usize, usize, f64);

/// One elimination step of the nucleus LU.
struct NucleusStep {
    row: usize,
    col: usize,
    pivot: f64,
    /// Multipliers `(row, l)`: row ← row − l · pivot row.
    lower: Vec<(usize, f64)>,
    /// Off-pivot entries of the pivot row (the U row).
    upper: Vec<(usize, f64)>,
}

/// Markowitz threshold: a pivot must be at least this fraction of the
/// largest entry in its column.
const MARKOWITZ_U: f64 = 0.1;

#[derive(Default)]
pub(crate) struct BasisFactor {
    nrows: usize,
    /// For each row: basis position of its slack, if the slack is basic.
    slack_pos: Vec<Option<usize>>,
    /// Row index of each core row slot.
    slot_row: Vec<usize>,
    /// Basis position and structural variable of each core column.
    core_pos: Vec<usize>,
    core_var: Vec<usize>,
    rows: Lines,
    cols: Lines,
    col_singletons: Vec<Pivot>,
    row_singletons: Vec<Pivot>,
    /// Row slots and core columns of the nucleus (local index → core index).
    nuc_rows: Vec<usize>,
    nuc_cols: Vec<usize>,
    in_nuc_row: Vec<bool>,
    in_nuc_col: Vec<bool>,
    /// Sparse LU of the nucleus in local indices, one entry per pivot.
    nuc_steps: Vec<NucleusStep>,
    etas: Vec<Eta>,
    eta_nnz: usize,
}

impl BasisFactor {
    pub fn empty() -> Self {
        BasisFactor::default()
    }

    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    pub fn eta_nnz(&self) -> usize {
        self.eta_nnz
    }

    /// Number of structural columns in the basis.
    pub fn core_dim(&self) -> usize {
        self.core_pos.len()
    }

    /// Factorizes the basis given as `basis[pos] = var`, where variables
    /// `>= nstruct` are slacks of row `var - nstruct`.
    pub fn factorize(
        &mut self,
        nstruct: usize,
        nrows: usize,
        cols: &[Vec<(usize, f64)>],
        basis: &[usize],
    ) -> Result<(), Singular> {
        self.nrows = nrows;
        self.slack_pos = vec![None; nrows];
        self.etas.clear();
        self.eta_nnz = 0;

        let mut struct_pos = Vec::new();
        for (pos, &var) in basis.iter().enumerate() {
            if var >= nstruct {
                self.slack_pos[var - nstruct] = Some(pos);
            } else {
                struct_pos.push(pos);
            }
        }
        let free_rows: Vec<usize> = (0..nrows).filter(|&r| self.slack_pos[r].is_none()).collect();
        let k = struct_pos.len();
        debug_assert_eq!(free_rows.len(), k, "basis must have one column per row");

        let mut row_slot = vec![usize::MAX; nrows];
        for (slot, &r) in free_rows.iter().enumerate() {
            row_slot[r] = slot;
        }
        let mut trip = Vec::new();
        for (c, &pos) in struct_pos.iter().enumerate() {
            for &(r, a) in &cols[basis[pos]] {
                let slot = row_slot[r];
                if slot != usize::MAX && a != 0.0 {
                    trip.push((slot, c, a));
                }
            }
        }
        self.rows = Lines::from_triplets(k, &trip);
        for t in trip.iter_mut() {
            *t = (t.1, t.0, t.2);
        }
        self.cols = Lines::from_triplets(k, &trip);
        self.slot_row = free_rows;
        self.core_pos = struct_pos;
        self.core_var = self.core_pos.iter().map(|&p| basis[p]).collect();

        self.peel_singletons(k);
        self.factor_nucleus()
    }

    fn peel_singletons(&mut self, k: usize) {
        let row_max: Vec<f64> = (0..k).map(|r| self.rows.line(r).map(|(_, a)| a.abs()).fold(0.0, f64::max)).collect();
        let col_max: Vec<f64> = (0..k).map(|c| self.cols.line(c).map(|(_, a)| a.abs()).fold(0.0, f64::max)).collect();
        let mut row_active = vec![true; k];
        let mut col_active = vec![true; k];
        let mut row_count: Vec<usize> = (0..k).map(|r| self.rows.len(r)).collect();
        let mut col_count: Vec<usize> = (0..k).map(|c| self.cols.len(c)).collect();
        self.col_singletons.clear();
        self.row_singletons.clear();

        // Column singletons: removing the pivot row can create new ones.
        let mut queue: Vec<usize> = (0..k).filter(|&c| col_count[c] == 1).collect();
        while let Some(c) = queue.pop() {
            if !col_active[c] || col_count[c] != 1 {
                continue;
            }
            let (r, a) = self.cols.line(c).find(|&(r, _)| row_active[r]).expect("count is one");
            if a.abs() <= PIVOT_TOL || a.abs() < SINGLETON_REL_TOL * row_max[r] {
                continue;
            }
            row_active[r] = false;
            col_active[c] = false;
            self.col_singletons.push((r, c, a));
            for (c2, _) in self.rows.line(r) {
                if col_active[c2] {
                    col_count[c2] -= 1;
                    if col_count[c2] == 1 {
                        queue.push(c2);
                    }
                }
            }
        }

        // Row singletons among what is left.
        for r in 0..k {
            row_count[r] = self.rows.line(r).filter(|&(c, _)| col_active[c]).count();
        }
        let mut queue: Vec<usize> = (0..k).filter(|&r| row_active[r] && row_count[r] == 1).collect();
        while let Some(r) = queue.pop() {
            if !row_active[r] || row_count[r] != 1 {
                continue;
            }
            let (c, a) = self.rows.line(r).find(|&(c, _)| col_active[c]).expect("count is one");
            if a.abs() <= PIVOT_TOL || a.abs() < SINGLETON_REL_TOL * col_max[c] {
                continue;
            }
            row_active[r] = false;
            col_active[c] = false;
            self.row_singletons.push((r, c, a));
            for (r2, _) in self.cols.line(c) {
                if row_active[r2] {
                    row_count[r2] -= 1;
                    if row_count[r2] == 1 {
                        queue.push(r2);
                    }
                }
            }
        }

        self.nuc_rows = (0..k).filter(|&r| row_active[r]).collect();
        self.nuc_cols = (0..k).filter(|&c| col_active[c]).collect();
        self.in_nuc_row = row_active;
        self.in_nuc_col = col_active;
    }

    /// Sparse LU of the nucleus: each step takes the active column with the
    /// fewest entries and, among rows passing the threshold test, the one
    /// with the fewest entries.
    fn factor_nucleus(&mut self) -> Result<(), Singular> {
        let kn = self.nuc_rows.len();
        let mut local_row = vec![usize::MAX; self.in_nuc_row.len()];
        for (i, &r) in self.nuc_rows.iter().enumerate() {
            local_row[r] = i;
        }
        let mut local_col = vec![usize::MAX; self.in_nuc_col.len()];
        for (j, &c) in self.nuc_cols.iter().enumerate() {
            local_col[c] = j;
        }
        let mut rows: Vec<Vec<(usize, f64)>> = self
            .nuc_rows
            .iter()
            .map(|&r| {
                self.rows.line(r).filter(|&(c, _)| local_col[c] != usize::MAX).map(|(c, a)| (local_col[c], a)).collect()
            })
            .collect();
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); kn];
        for (i, row) in rows.iter().enumerate() {
            for &(j, _) in row {
                col_rows[j].push(i);
            }
        }
        let mut col_count: Vec<usize> = col_rows.iter().map(Vec::len).collect();
        let mut row_active = vec![true; kn];
        let mut col_active = vec![true; kn];
        let mut slot = vec![usize::MAX; kn];
        let mut steps = Vec::with_capacity(kn);
        let mut bad_cols = Vec::new();

        for _ in 0..kn {
            let Some(q) = (0..kn).filter(|&j| col_active[j]).min_by_key(|&j| col_count[j]) else { break };
            col_active[q] = false;
            let entry = |rows: &[Vec<(usize, f64)>], i: usize| rows[i].iter().find(|e| e.0 == q).map(|e| e.1);
            col_rows[q].retain(|&i| row_active[i]);
            col_rows[q].dedup();
            let cmax = col_rows[q].iter().filter_map(|&i| entry(&rows, i)).map(f64::abs).fold(0.0, f64::max);
            if cmax <= PIVOT_TOL {
                bad_cols.push(q);
                continue;
            }
            let p = col_rows[q]
                .iter()
                .copied()
                .filter(|&i| entry(&rows, i).is_some_and(|a| a.abs() >= MARKOWITZ_U * cmax && a.abs() > PIVOT_TOL))
                .min_by_key(|&i| rows[i].len())
                .expect("the largest entry qualifies");
            row_active[p] = false;
            let prow = std::mem::take(&mut rows[p]);
            let pivot = entry(std::slice::from_ref(&prow), 0).expect("pivot present");
            for &(j, _) in &prow {
                if col_active[j] {
                    col_count[j] -= 1;
                }
            }
            let upper: Vec<(usize, f64)> = prow.iter().copied().filter(|e| e.0 != q).collect();
            let mut lower = Vec::new();
            for idx in 0..col_rows[q].len() {
                let i = col_rows[q][idx];
                if i == p || !row_active[i] {
                    continue;
                }
                let Some(k) = rows[i].iter().position(|e| e.0 == q) else { continue };
                let l = rows[i][k].1 / pivot;
                rows[i].swap_remove(k);
                if l == 0.0 {
                    continue;
                }
                lower.push((i, l));
                for (k, &(j, _)) in rows[i].iter().enumerate() {
                    slot[j] = k;
                }
                for &(j, u) in &upper {
                    if slot[j] != usize::MAX {
                        rows[i][slot[j]].1 -= l * u;
                    } else {
                        rows[i].push((j, -l * u));
                        col_rows[j].push(i);
                        col_count[j] += 1;
                    }
                }
                for &(j, _) in rows[i].iter() {
                    slot[j] = usize::MAX;
                }
            }
            steps.push(NucleusStep { row: p, col: q, pivot, lower, upper });
        }
        if !bad_cols.is_empty() {
            let unused: Vec<usize> =
                (0..kn).filter(|&i| row_active[i]).map(|i| self.slot_row[self.nuc_rows[i]]).collect();
            return Err(Singular {
                positions: bad_cols.iter().map(|&j| self.core_pos[self.nuc_cols[j]]).collect(),
                free_rows: unused,
            });
        }
        self.nuc_steps = steps;
        Ok(())
    }

    /// `w[c] = (b[r] − Σ_{c' ≠ c} a_rc' w[c']) / a_rc` for a peeled pivot.
    fn solve_row(&self, bl: &[f64], w: &mut [f64], (r, c, p): Pivot) {
        let mut s = bl[r];
        for (c2, a) in self.rows.line(r) {
            if c2 != c {
                s -= a * w[c2];
            }
        }
        w[c] = s / p;
    }

    /// Transposed counterpart of [`solve_row`](Self::solve_row).
    fn solve_col(&self, wl: &[f64], y: &mut [f64], (r, c, p): Pivot) {
        let mut s = wl[c];
        for (r2, a) in self.cols.line(c) {
            if r2 != r {
                s -= a * y[r2];
            }
        }
        y[r] = s / p;
    }

    /// Solves `B w = b` for a dense right-hand side in row space; the result
    /// is indexed by basis position.
    pub fn ftran(&self, cols: &[Vec<(usize, f64)>], b: &[f64]) -> Vec<f64> {
        let k = self.core_pos.len();
        let mut out = vec![0.0; self.nrows];

        let bl: Vec<f64> = self.slot_row.iter().map(|&r| b[r]).collect();
        let mut w = vec![0.0; k];
        for &piv in &self.row_singletons {
            self.solve_row(&bl, &mut w, piv);
        }
        if !self.nuc_steps.is_empty() {
            let mut v: Vec<f64> = self
                .nuc_rows
                .iter()
                .map(|&r| {
                    let mut s = bl[r];
                    for (c, a) in self.rows.line(r) {
                        if !self.in_nuc_col[c] {
                            s -= a * w[c];
                        }
                    }
                    s
                })
                .collect();
            for st in &self.nuc_steps {
                let vp = v[st.row];
                if vp != 0.0 {
                    for &(i, l) in &st.lower {
                        v[i] -= l * vp;
                    }
                }
            }
            let mut x = vec![0.0; v.len()];
            for st in self.nuc_steps.iter().rev() {
                let mut acc = v[st.row];
                for &(j, u) in &st.upper {
                    acc -= u * x[j];
                }
                x[st.col] = acc / st.pivot;
            }
            for (j, &c) in self.nuc_cols.iter().enumerate() {
                w[c] = x[j];
            }
        }
        for &piv in self.col_singletons.iter().rev() {
            self.solve_row(&bl, &mut w, piv);
        }

        // Slack rows absorb whatever the structural part leaves over.
        let mut residual: Vec<f64> = b.to_vec();
        for (c, &var) in self.core_var.iter().enumerate() {
            let val = w[c];
            out[self.core_pos[c]] = val;
            if val != 0.0 {
                for &(r, a) in &cols[var] {
                    residual[r] -= a * val;
                }
            }
        }
        for (r, pos) in self.slack_pos.iter().enumerate() {
            if let Some(p) = *pos {
                out[p] = residual[r];
            }
        }

        for eta in &self.etas {
            let xp = out[eta.pos] / eta.pivot;
            out[eta.pos] = xp;
            if xp != 0.0 {
                for &(i, a) in &eta.entries {
                    out[i] -= a * xp;
                }
            }
        }
        out
    }

    /// Solves `yᵀ B = cᵀ` for `c` indexed by basis position; returns `y` in
    /// row space.
    pub fn btran(&self, cols: &[Vec<(usize, f64)>], c: &[f64]) -> Vec<f64> {
        let mut u = c.to_vec();
        for eta in self.etas.iter().rev() {
            let mut acc = u[eta.pos];
            for &(i, a) in &eta.entries {
                acc -= u[i] * a;
            }
            u[eta.pos] = acc / eta.pivot;
        }

        let mut y = vec![0.0; self.nrows];
        for (r, pos) in self.slack_pos.iter().enumerate() {
            if let Some(p) = *pos {
                y[r] = u[p];
            }
        }
        // rhs_J = c_J - A[S, J]^T y_S
        let wl: Vec<f64> = self
            .core_var
            .iter()
            .zip(&self.core_pos)
            .map(|(&var, &pos)| {
                let mut acc = u[pos];
                for &(r, a) in &cols[var] {
                    if self.slack_pos[r].is_some() {
                        acc -= a * y[r];
                    }
                }
                acc
            })
            .collect();

        let k = self.core_pos.len();
        let mut yl = vec![0.0; k];
        for &piv in &self.col_singletons {
            self.solve_col(&wl, &mut yl, piv);
        }
        if !self.nuc_steps.is_empty() {
            let mut v: Vec<f64> = self
                .nuc_cols
                .iter()
                .map(|&c| {
                    let mut s = wl[c];
                    for (r, a) in self.cols.line(c) {
                        if !self.in_nuc_row[r] {
                            s -= a * yl[r];
                        }
                    }
                    s
                })
                .collect();
            // Uᵀ then Lᵀ.
            let mut z = vec![0.0; v.len()];
            for st in &self.nuc_steps {
                let zp = v[st.col] / st.pivot;
                z[st.row] = zp;
                if zp != 0.0 {
                    for &(j, u) in &st.upper {
                        v[j] -= u * zp;
                    }
                }
            }
            for st in self.nuc_steps.iter().rev() {
                let mut acc = z[st.row];
                for &(i, l) in &st.lower {
                    acc -= l * z[i];
                }
                z[st.row] = acc;
            }
            for (i, &r) in self.nuc_rows.iter().enumerate() {
                yl[r] = z[i];
            }
        }
        for &piv in self.row_singletons.iter().rev() {
            self.solve_col(&wl, &mut yl, piv);
        }
        for (slot, &r) in self.slot_row.iter().enumerate() {
            y[r] = yl[slot];
        }
        y
    }

    /// Records the basis change at `pos` whose transformed entering column is
    /// `alpha` (the output of [`ftran`](Self::ftran) for that column).
    pub fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let entries: Vec<(usize, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != pos && a.abs() > ETA_DROP)
            .map(|(i, &a)| (i, a))
            .collect();
        self.eta_nnz += entries.len() + 1;
        self.etas.push(Eta { pos, pivot: alpha[pos], entries });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let ncols = a[0].len();
        (0..ncols)
            .map(|j| a.iter().enumerate().filter(|(_, row)| row[j] != 0.0).map(|(i, row)| (i, row[j])).collect())
            .collect()
    }

    fn basis_matrix(a: &[Vec<f64>], basis: &[usize]) -> Vec<Vec<f64>> {
        let nstruct = a[0].len();
        let m = a.len();
        (0..m)
            .map(|i| {
                basis
                    .iter()
                    .map(|&v| if v >= nstruct { f64::from(u8::from(v - nstruct == i)) } else { a[i][v] })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn ftran_btran_invert_mixed_basis() {
        let a = vec![
            vec![2.0, 1.0, 0.0, 3.0],
            vec![0.0, 4.0, 1.0, 0.0],
            vec![1.0, 0.0, 5.0, 1.0],
            vec![0.0, 2.0, 0.0, 1.0],
        ];
        let cols = dense_cols(&a);
        // Structural 0, 2, 3 and the slack of row 1.
        let basis = vec![0, 4 + 1, 2, 3];
        let mut f = BasisFactor::empty();
        f.factorize(4, 4, &cols, &basis).unwrap();
        let bm = basis_matrix(&a, &basis);

        let b = vec![1.0, -2.0, 0.5, 3.0];
        let w = f.ftran(&cols, &b);
        for i in 0..4 {
            let lhs: f64 = (0..4).map(|p| bm[i][p] * w[p]).sum();
            assert!((lhs - b[i]).abs() < 1e-12);
        }
        let c = vec![0.3, 1.0, -1.0, 2.0];
        let y = f.btran(&cols, &c);
        for p in 0..4 {
            let lhs: f64 = (0..4).map(|i| y[i] * bm[i][p]).sum();
            assert!((lhs - c[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_updates_track_basis_changes() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![3.0, 1.0, 1.0], vec![0.0, 1.0, 4.0]];
        let cols = dense_cols(&a);
        let mut basis = vec![3, 4, 5];
        let mut f = BasisFactor::empty();
        f.factorize(3, 3, &cols, &basis).unwrap();
        for (pos, var) in [(0usize, 0usize), (2, 2), (1, 1)] {
            let mut dense = vec![0.0; 3];
            for &(r, v) in &cols[var] {
                dense[r] = v;
            }
            let alpha = f.ftran(&cols, &dense);
            f.push_eta(pos, &alpha);
            basis[pos] = var;
        }
        let bm = basis_matrix(&a, &basis);
        let b = vec![1.0, 2.0, 3.0];
        let w = f.ftran(&cols, &b);
        for i in 0..3 {
            let lhs: f64 = (0..3).map(|p| bm[i][p] * w[p]).sum();
            assert!((lhs - b[i]).abs() < 1e-12);
        }
        let y = f.btran(&cols, &b);
        for p in 0..3 {
            let lhs: f64 = (0..3).map(|i| y[i] * bm[i][p]).sum();
            assert!((lhs - b[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_columns_are_reported() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let cols = dense_cols(&a);
        let mut f = BasisFactor::empty();
        let err = f.factorize(2, 2, &cols, &[0, 1]).unwrap_err();
        assert_eq!(err.positions, vec![1]);
        assert_eq!(err.free_rows.len(), 1);
    }

    #[test]
    fn random_sparse_bases_solve_both_ways() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let m = rng.gen_range(5..40);
            let nstruct = m + rng.gen_range(0..10);
            // Sparse columns with a strong entry on a random row so most
            // random bases are nonsingular; a few dense columns force a
            // nontrivial nucleus.
            let mut a = vec![vec![0.0; nstruct]; m];
            for j in 0..nstruct {
                let nnz = if rng.gen_bool(0.2) { m / 2 + 1 } else { rng.gen_range(1..4) };
                for _ in 0..nnz {
                    a[rng.gen_range(0..m)][j] = rng.gen_range(-3.0..3.0);
                }
                a[j % m][j] += 4.0;
            }
            let cols = dense_cols(&a);
            let mut basis: Vec<usize> = (0..m).map(|i| if rng.gen_bool(0.7) { i } else { nstruct + i }).collect();
            let mut f = BasisFactor::empty();
            if let Err(sing) = f.factorize(nstruct, m, &cols, &basis) {
                for (&pos, &row) in sing.positions.iter().zip(&sing.free_rows) {
                    basis[pos] = nstruct + row;
                }
                f.factorize(nstruct, m, &cols, &basis).unwrap();
            }
            let bm = basis_matrix(&a, &basis);
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = f.ftran(&cols, &b);
            let y = f.btran(&cols, &b);
            for i in 0..m {
                let lhs: f64 = (0..m).map(|p| bm[i][p] * w[p]).sum();
                assert!((lhs - b[i]).abs() < 1e-8, "ftran residual {}", lhs - b[i]);
                let lhs: f64 = (0..m).map(|r| y[r] * bm[r][i]).sum();
                assert!((lhs - b[i]).abs() < 1e-8, "btran residual {}", lhs - b[i]);
            }
        }
    }
}
