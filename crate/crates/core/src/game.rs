//! Quadratic aggregative games and their affine game mapping.
//!
//! Player `i` minimises `½ xᵢᵀQᵢxᵢ + (1/N Σ_{j≠i} C_{i,j} x_j + qᵢ)ᵀ xᵢ` over a
//! bounded polytope `Xᵢ`. Stacking the partial gradients gives
//! `F(x) = Mx + q` with diagonal blocks `Qᵢ` and off-diagonal blocks
//! `C_{i,j} / N`.

use crate::error::{GneError, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::polytope::HalfspaceSystem;
use crate::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    /// Cost curvature `Qᵢ`, symmetric positive definite.
    pub q_block: Matrix,
    /// `j ↦ C_{i,j}` for the players this one interacts with.
    pub interactions: BTreeMap<usize, Matrix>,
    pub linear_cost: Vec<f64>,
    /// Local constraint rows `Hᵢ xᵢ ≤ hᵢ`.
    pub local_a: Matrix,
    pub local_b: Vec<f64>,
}

impl PlayerSpec {
    pub fn new(q_block: Matrix, linear_cost: Vec<f64>, local_a: Matrix, local_b: Vec<f64>) -> Self {
        PlayerSpec {
            q_block,
            interactions: BTreeMap::new(),
            linear_cost,
            local_a,
            local_b,
        }
    }

    /// Box-constrained player: emits `2·nᵢ` rows `x ≤ hi`, `−x ≤ −lo`.
    pub fn with_box(q_block: Matrix, linear_cost: Vec<f64>, bounds: &[(f64, f64)]) -> Self {
        let (a, b) = box_rows(bounds);
        PlayerSpec::new(q_block, linear_cost, a, b)
    }

    pub fn interact(mut self, j: usize, c: Matrix) -> Self {
        self.interactions.insert(j, c);
        self
    }

    pub fn dim(&self) -> usize {
        self.linear_cost.len()
    }
}

/// Rows of the box `lo ≤ x ≤ hi`, upper bounds first for each coordinate.
pub fn box_rows(bounds: &[(f64, f64)]) -> (Matrix, Vec<f64>) {
    let n = bounds.len();
    let mut a = Matrix::zeros(0, n);
    let mut b = Vec::with_capacity(2 * n);
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[k] = 1.0;
        a.push_row(&row);
        b.push(hi);
        row[k] = -1.0;
        a.push_row(&row);
        b.push(-lo);
    }
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityVerdict {
    StrictlyMonotone,
    Monotone,
    NotMonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub verdict: MonotonicityVerdict,
    /// Smallest eigenvalue of `(M + Mᵀ)/2`.
    pub min_eigenvalue: f64,
}

/// Classifies `x ↦ Mx + q` by the spectrum of the symmetric part of `M`.
pub fn check_monotone_matrix(m: &Matrix, tol: f64) -> Result<MonotonicityReport> {
    if !m.is_square() {
        return Err(GneError::Dimension(format!(
            "mapping matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let min_eigenvalue = symmetric_eigen(&m.sym_sum().scale(0.5)).min();
    let verdict = if min_eigenvalue > tol {
        MonotonicityVerdict::StrictlyMonotone
    } else if min_eigenvalue >= -tol {
        MonotonicityVerdict::Monotone
    } else {
        MonotonicityVerdict::NotMonotone
    };
    Ok(MonotonicityReport {
        verdict,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregativeGame {
    pub n_players: usize,
    pub dims: Vec<usize>,
    pub mapping_matrix: Matrix,
    pub mapping_offset: Vec<f64>,
    /// Stacked local rows `Hx ≤ h` for `X = Π Xᵢ`.
    pub local_a: Matrix,
    pub local_b: Vec<f64>,
}

impl AggregativeGame {
    pub fn dim(&self) -> usize {
        self.mapping_offset.len()
    }

    /// Offset of player `i`'s block in the stacked strategy vector.
    pub fn block_offset(&self, i: usize) -> usize {
        self.dims[..i].iter().sum()
    }

    /// `F(x) = Mx + q`.
    pub fn mapping(&self, x: &[f64]) -> Vec<f64> {
        let mut f = self.mapping_matrix.mul_vec(x);
        for (fi, qi) in f.iter_mut().zip(&self.mapping_offset) {
            *fi += qi;
        }
        f
    }

    pub fn local_system(&self) -> HalfspaceSystem {
        HalfspaceSystem::local(self.local_a.clone(), self.local_b.clone())
    }

    pub fn check_monotone(&self, tol: f64) -> MonotonicityReport {
        check_monotone_matrix(&self.mapping_matrix, tol).expect("mapping matrix is square")
    }

    /// Builds a game directly from affine VI data, for mappings that do not
    /// come from per-player blocks (e.g. a purely linear game with `M = 0`).
    pub fn from_affine(
        mapping_matrix: Matrix,
        mapping_offset: Vec<f64>,
        local_a: Matrix,
        local_b: Vec<f64>,
        tol: &ToleranceSet,
    ) -> Result<Self> {
        let n = mapping_offset.len();
        if mapping_matrix.rows() != n || mapping_matrix.cols() != n {
            return Err(GneError::Dimension(format!(
                "mapping matrix is {}x{} but offset has length {n}",
                mapping_matrix.rows(),
                mapping_matrix.cols()
            )));
        }
        if local_a.cols() != n || local_a.rows() != local_b.len() {
            return Err(GneError::Dimension("local rows do not match the strategy dimension".into()));
        }
        check_polytope(&local_a, &local_b, 0, tol)?;
        let game = AggregativeGame {
            n_players: 1,
            dims: vec![n],
            mapping_matrix,
            mapping_offset,
            local_a,
            local_b,
        };
        let report = game.check_monotone(tol.monotone);
        if report.verdict == MonotonicityVerdict::NotMonotone {
            return Err(GneError::NotMonotone {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(game)
    }

    pub fn from_json_str(text: &str, tol: &ToleranceSet) -> Result<Self> {
        let doc: GameDocument = serde_json::from_str(text)?;
        doc.into_game(tol)
    }

    pub fn from_json_file(path: &Path, tol: &ToleranceSet) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?, tol)
    }
}

/// Non-empty and bounded, checked through support values along `±eₖ`.
fn check_polytope(a: &Matrix, b: &[f64], player: usize, tol: &ToleranceSet) -> Result<()> {
    let n = a.cols();
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n];
            c[k] = -sign;
            let mut lp = LinearProgram::new(n).minimize(c);
            lp.a_ub = a.clone();
            lp.b_ub = b.to_vec();
            let out = solve_lp(&lp, tol)?;
            match out.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => return Err(GneError::BadLocalSet { player, reason: "empty" }),
                LpStatus::Unbounded => return Err(GneError::BadLocalSet { player, reason: "unbounded" }),
                LpStatus::NumericalFailure => {
                    return Err(GneError::Numerical(out.diagnostic.unwrap_or_default()))
                }
            }
        }
    }
    Ok(())
}

/// Assembles `M`, `q` and the stacked local rows from per-player data.
pub fn assemble_game(players: &[PlayerSpec], tol: &ToleranceSet) -> Result<AggregativeGame> {
    if players.is_empty() {
        return Err(GneError::EmptyGame);
    }
    let n_players = players.len();
    let dims: Vec<usize> = players.iter().map(PlayerSpec::dim).collect();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let n: usize = dims.iter().sum();
    let inv_n = 1.0 / n_players as f64;

    let mut m = Matrix::zeros(n, n);
    let mut q = Vec::with_capacity(n);
    let mut local_a = Matrix::zeros(0, n);
    let mut local_b = Vec::new();

    for (i, p) in players.iter().enumerate() {
        let ni = dims[i];
        if ni == 0 {
            return Err(GneError::Dimension(format!("player {i} has no decision variables")));
        }
        if p.q_block.rows() != ni || p.q_block.cols() != ni {
            return Err(GneError::Dimension(format!(
                "player {i}: Q is {}x{}, expected {ni}x{ni}",
                p.q_block.rows(),
                p.q_block.cols()
            )));
        }
        if !p.q_block.is_symmetric(1e-12 * (1.0 + p.q_block.max_abs())) {
            return Err(GneError::NotPositiveDefinite {
                player: i,
                min_eigenvalue: f64::NAN,
            });
        }
        let min_eig = symmetric_eigen(&p.q_block).min();
        if min_eig <= tol.monotone {
            return Err(GneError::NotPositiveDefinite {
                player: i,
                min_eigenvalue: min_eig,
            });
        }
        m.set_block(offsets[i], offsets[i], &p.q_block);

        for (&j, c) in &p.interactions {
            if j >= n_players {
                return Err(GneError::Dimension(format!(
                    "player {i} interacts with unknown player {j}"
                )));
            }
            if j == i {
                return Err(GneError::Dimension(format!("player {i} lists a self-interaction")));
            }
            if c.rows() != ni || c.cols() != dims[j] {
                return Err(GneError::Dimension(format!(
                    "player {i}: C[{j}] is {}x{}, expected {ni}x{}",
                    c.rows(),
                    c.cols(),
                    dims[j]
                )));
            }
            m.set_block(offsets[i], offsets[j], &c.scale(inv_n));
        }

        q.extend_from_slice(&p.linear_cost);

        if p.local_a.rows() != p.local_b.len() || (p.local_a.rows() > 0 && p.local_a.cols() != ni) {
            return Err(GneError::Dimension(format!("player {i}: local rows have the wrong shape")));
        }
        check_polytope(&p.local_a, &p.local_b, i, tol)?;
        for r in 0..p.local_a.rows() {
            let mut row = vec![0.0; n];
            row[offsets[i]..offsets[i] + ni].copy_from_slice(p.local_a.row(r));
            local_a.push_row(&row);
            local_b.push(p.local_b[r]);
        }
    }

    let game = AggregativeGame {
        n_players,
        dims,
        mapping_matrix: m,
        mapping_offset: q,
        local_a,
        local_b,
    };
    let report = game.check_monotone(tol.monotone);
    if report.verdict == MonotonicityVerdict::NotMonotone {
        return Err(GneError::NotMonotone {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    Ok(game)
}

/// JSON form of a game.
///
/// ```json
/// { "players": [ { "Q": [[1.0]], "C": {"1": [[-2.0]]}, "q": [1.0], "box": [[-2.0, 2.0]] } ] }
/// ```
///
/// Keys of `C` are zero-based player indices. A player gives either `box`
/// or general rows `H`/`h` (or both, which are concatenated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub players: Vec<PlayerDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerDocument {
    #[serde(rename = "Q")]
    pub q_block: Vec<Vec<f64>>,
    #[serde(rename = "C", default)]
    pub interactions: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(rename = "q")]
    pub linear_cost: Vec<f64>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub local_a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "h", default, skip_serializing_if = "Option::is_none")]
    pub local_b: Option<Vec<f64>>,
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix> {
    Matrix::from_rows(rows).ok_or_else(|| GneError::Dimension(format!("{what} has ragged rows")))
}

impl PlayerDocument {
    fn to_spec(&self, i: usize) -> Result<PlayerSpec> {
        let ni = self.linear_cost.len();
        let q_block = matrix(&self.q_block, "Q")?;
        let mut a = Matrix::zeros(0, ni);
        let mut b = Vec::new();
        if let Some(bounds) = &self.bounds {
            if bounds.len() != ni {
                return Err(GneError::Dimension(format!("player {i}: box has {} entries, expected {ni}", bounds.len())));
            }
            if let Some(k) = bounds.iter().position(|[lo, hi]| lo > hi) {
                return Err(GneError::InvalidArgument(format!("player {i}: box entry {k} has lo > hi")));
            }
            let pairs: Vec<(f64, f64)> = bounds.iter().map(|&[lo, hi]| (lo, hi)).collect();
            let (ba, bb) = box_rows(&pairs);
            a = a.vstack(&ba);
            b.extend(bb);
        }
        match (&self.local_a, &self.local_b) {
            (Some(ha), Some(hb)) => {
                let ha = matrix(ha, "H")?;
                if ha.rows() != hb.len() {
                    return Err(GneError::Dimension(format!("player {i}: H and h disagree")));
                }
                a = a.vstack(&ha);
                b.extend_from_slice(hb);
            }
            (None, None) => {}
            _ => return Err(GneError::InvalidArgument(format!("player {i}: H and h must be given together"))),
        }
        if a.rows() == 0 {
            return Err(GneError::BadLocalSet { player: i, reason: "unbounded" });
        }
        let mut spec = PlayerSpec::new(q_block, self.linear_cost.clone(), a, b);
        for (key, c) in &self.interactions {
            let j: usize = key
                .parse()
                .map_err(|_| GneError::InvalidArgument(format!("player {i}: interaction key {key:?} is not an index")))?;
            spec.interactions.insert(j, matrix(c, "C")?);
        }
        Ok(spec)
    }
}

impl GameDocument {
    pub fn to_specs(&self) -> Result<Vec<PlayerSpec>> {
        self.players.iter().enumerate().map(|(i, p)| p.to_spec(i)).collect()
    }

    pub fn into_game(self, tol: &ToleranceSet) -> Result<AggregativeGame> {
        assemble_game(&self.to_specs()?, tol)
    }
}

/// The two-player example: scalar players, `Qᵢ = 1`, `C₁₂ = C₂₁ = −2`,
/// `q = (1, −1)` and boxes `|xᵢ| ≤ 2`.
pub fn two_player_example() -> AggregativeGame {
    let one = Matrix::from_rows(&[vec![1.0]]).unwrap();
    let c = Matrix::from_rows(&[vec![-2.0]]).unwrap();
    let p1 = PlayerSpec::with_box(one.clone(), vec![1.0], &[(-2.0, 2.0)]).interact(1, c.clone());
    let p2 = PlayerSpec::with_box(one, vec![-1.0], &[(-2.0, 2.0)]).interact(0, c);
    assemble_game(&[p1, p2], &ToleranceSet::default()).expect("example game is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn scalar(v: f64) -> Matrix {
        Matrix::from_rows(&[vec![v]]).unwrap()
    }

    #[test]
    fn example_mapping_matrix() {
        let g = two_player_example();
        assert_eq!(g.mapping_matrix.to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert_eq!(g.mapping_offset, vec![1.0, -1.0]);
        assert_eq!(g.local_a.rows(), 4);
    }

    #[test]
    fn single_player_degenerate_aggregation() {
        let p = PlayerSpec::with_box(scalar(2.0), vec![0.0], &[(-1.0, 1.0)]);
        let g = assemble_game(&[p], &ToleranceSet::default()).unwrap();
        assert_eq!(g.mapping_matrix.to_rows(), vec![vec![2.0]]);
        assert_eq!(g.mapping_offset, vec![0.0]);
    }

    #[test]
    fn three_players_scale_interactions_by_one_third() {
        let players: Vec<PlayerSpec> = (0..3)
            .map(|i| {
                let mut p = PlayerSpec::with_box(scalar(4.0), vec![0.0], &[(-1.0, 1.0)]);
                for j in (0..3).filter(|&j| j != i) {
                    p = p.interact(j, scalar(3.0));
                }
                p
            })
            .collect();
        let g = assemble_game(&players, &ToleranceSet::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 4.0 } else { 1.0 };
                assert_abs_diff_eq!(g.mapping_matrix[(i, j)], expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn empty_player_list() {
        assert!(matches!(assemble_game(&[], &ToleranceSet::default()), Err(GneError::EmptyGame)));
    }

    #[test]
    fn interaction_dimension_mismatch() {
        let p1 = PlayerSpec::with_box(scalar(1.0), vec![0.0], &[(-1.0, 1.0)])
            .interact(1, Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap());
        let p2 = PlayerSpec::with_box(scalar(1.0), vec![0.0], &[(-1.0, 1.0)]);
        assert!(matches!(
            assemble_game(&[p1, p2], &ToleranceSet::default()),
            Err(GneError::Dimension(_))
        ));
    }

    #[test]
    fn indefinite_curvature_rejected() {
        let p = PlayerSpec::with_box(scalar(-1.0), vec![0.0], &[(-1.0, 1.0)]);
        assert!(matches!(
            assemble_game(&[p], &ToleranceSet::default()),
            Err(GneError::NotPositiveDefinite { player: 0, .. })
        ));
    }

    #[test]
    fn unbounded_local_set_rejected() {
        let a = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let p = PlayerSpec::new(scalar(1.0), vec![0.0], a, vec![1.0]);
        assert!(matches!(
            assemble_game(&[p], &ToleranceSet::default()),
            Err(GneError::BadLocalSet { reason: "unbounded", .. })
        ));
    }

    #[test]
    fn empty_local_set_rejected() {
        let p = PlayerSpec::with_box(scalar(1.0), vec![0.0], &[(1.0, 0.0)]);
        assert!(matches!(
            assemble_game(&[p], &ToleranceSet::default()),
            Err(GneError::BadLocalSet { reason: "empty", .. })
        ));
    }

    #[test]
    fn monotonicity_verdicts() {
        let g = two_player_example();
        let r = g.check_monotone(1e-9);
        assert_eq!(r.verdict, MonotonicityVerdict::Monotone);
        assert_abs_diff_eq!(r.min_eigenvalue, 0.0, epsilon = 1e-12);

        let r = check_monotone_matrix(&Matrix::identity(3), 1e-9).unwrap();
        assert_eq!(r.verdict, MonotonicityVerdict::StrictlyMonotone);

        let skew = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let r = check_monotone_matrix(&skew, 1e-9).unwrap();
        assert_eq!(r.verdict, MonotonicityVerdict::NotMonotone);
        assert_abs_diff_eq!(r.min_eigenvalue, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_monotone_game_rejected() {
        let p1 = PlayerSpec::with_box(scalar(1.0), vec![0.0], &[(-1.0, 1.0)]).interact(1, scalar(6.0));
        let p2 = PlayerSpec::with_box(scalar(1.0), vec![0.0], &[(-1.0, 1.0)]).interact(0, scalar(6.0));
        assert!(matches!(
            assemble_game(&[p1, p2], &ToleranceSet::default()),
            Err(GneError::NotMonotone { .. })
        ));
    }

    #[test]
    fn gradient_matches_hand_expansion() {
        // ∇x1 J1 = x1 + 1 − x2, ∇x2 J2 = x2 − 1 − x1
        let g = two_player_example();
        for &(x1, x2) in &[(0.0, 1.0), (0.5, -1.5), (-2.0, 2.0)] {
            let f = g.mapping(&[x1, x2]);
            assert_abs_diff_eq!(f[0], x1 + 1.0 - x2, epsilon = 1e-15);
            assert_abs_diff_eq!(f[1], x2 - 1.0 - x1, epsilon = 1e-15);
        }
        assert_eq!(g.mapping(&[0.0, 1.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn json_round_trip_of_example() {
        let text = r#"{ "players": [
            { "Q": [[1.0]], "C": {"1": [[-2.0]]}, "q": [1.0], "box": [[-2.0, 2.0]] },
            { "Q": [[1.0]], "C": {"0": [[-2.0]]}, "q": [-1.0], "box": [[-2.0, 2.0]] } ] }"#;
        let g = AggregativeGame::from_json_str(text, &ToleranceSet::default()).unwrap();
        assert_eq!(g, two_player_example());
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let text = r#"{ "players": [ { "Q": [[1.0]], "q": [0.0], "box": [[0,1]], "extra": 1 } ] }"#;
        assert!(matches!(
            AggregativeGame::from_json_str(text, &ToleranceSet::default()),
            Err(GneError::Json(_))
        ));
    }

    proptest! {
        #[test]
        fn interaction_blocks_read_back(c12 in -3.0..3.0f64, c21 in -3.0..3.0f64, n3 in 1usize..3) {
            // Strong curvature keeps the game monotone for any interaction draw.
            let q = Matrix::identity(n3).scale(10.0);
            let c_a = Matrix::from_row_major(n3, 1, vec![c12; n3]).unwrap();
            let c_b = Matrix::from_row_major(1, n3, vec![c21; n3]).unwrap();
            let bx = vec![(-1.0, 1.0); n3];
            let p1 = PlayerSpec::with_box(q, vec![0.0; n3], &bx).interact(1, c_a.clone());
            let p2 = PlayerSpec::with_box(scalar(10.0), vec![0.0], &[(-1.0, 1.0)]).interact(0, c_b.clone());
            let g = assemble_game(&[p1, p2], &ToleranceSet::default()).unwrap();
            let back = g.mapping_matrix.block(0, n3, n3, 1).scale(2.0);
            prop_assert_eq!(back, c_a);
            let back = g.mapping_matrix.block(n3, 0, 1, n3).scale(2.0);
            prop_assert_eq!(back, c_b);
        }

        #[test]
        fn mapping_is_affine(x in prop::array::uniform2(-5.0..5.0f64),
                             y in prop::array::uniform2(-5.0..5.0f64),
                             a in 0.0..1.0f64) {
            let g = two_player_example();
            let mix: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| a * xi + (1.0 - a) * yi).collect();
            let lhs = g.mapping(&mix);
            let fx = g.mapping(&x);
            let fy = g.mapping(&y);
            for k in 0..2 {
                prop_assert!((lhs[k] - (a * fx[k] + (1.0 - a) * fy[k])).abs() <= 1e-12);
            }
        }
    }
}
