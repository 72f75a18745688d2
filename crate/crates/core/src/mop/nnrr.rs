use super::{AngelescoSystem, Geometry, MopSolution, MultiIndex, WeightSpec};
use crate::precision::{max_abs, to_decimal, PrecisionContext, XReal};
use crate::{Error, Result};
use rug::Float;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// Recurrence coefficients at one multi-index.
#[derive(Clone, Debug)]
pub struct NnrrEntry {
    pub a: [XReal; 2],
    pub b: [XReal; 2],
    /// `|b(route i) − b(route ii)|` per component.
    pub b_discrepancy: [XReal; 2],
}

/// Nearest-neighbour recurrence coefficients over a set of multi-indices.
#[derive(Clone, Debug)]
pub struct NnrrTable {
    pub entries: BTreeMap<MultiIndex, NnrrEntry>,
}

/// Solutions backing a table: every index of the table plus its forward
/// and backward neighbours.
pub type SolutionSet = BTreeMap<MultiIndex, MopSolution>;

impl NnrrTable {
    pub fn get(&self, n: MultiIndex) -> Option<&NnrrEntry> {
        self.entries.get(&n)
    }

    pub fn a(&self, n: MultiIndex, i: usize) -> Option<&XReal> {
        self.entries.get(&n).map(|e| &e.a[i - 1])
    }

    pub fn b(&self, n: MultiIndex, i: usize) -> Option<&XReal> {
        self.entries.get(&n).map(|e| &e.b[i - 1])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV `n1,n2,a1,a2,b1,b2` with `digits` significant digits.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n1,n2,a1,a2,b1,b2\n");
        for (n, e) in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                n.n1,
                n.n2,
                to_decimal(&e.a[0], digits),
                to_decimal(&e.a[1], digits),
                to_decimal(&e.b[0], digits),
                to_decimal(&e.b[1], digits)
            );
        }
        out
    }

    /// Parses the CSV produced by [`to_csv`](Self::to_csv); discrepancies
    /// are not stored and come back as zero.
    pub fn from_csv(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("n1,n2,a1,a2,b1,b2") {
            return Err(Error::Parse("missing NNRR header".into()));
        }
        let mut entries = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Parse(format!("bad NNRR row {line:?}")));
            }
            let idx = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Parse(e.to_string()));
            let n = MultiIndex::new(idx(f[0])?, idx(f[1])?);
            entries.insert(
                n,
                NnrrEntry {
                    a: [ctx.parse(f[2])?, ctx.parse(f[3])?],
                    b: [ctx.parse(f[4])?, ctx.parse(f[5])?],
                    b_discrepancy: [ctx.zero(), ctx.zero()],
                },
            );
        }
        Ok(Self { entries })
    }
}

/// Indices whose solutions are needed to fill table entries at `indices`.
fn support(indices: &[MultiIndex]) -> Vec<MultiIndex> {
    let mut need = BTreeSet::new();
    for &n in indices {
        need.insert(n);
        for j in 1..=2 {
            need.insert(n.plus(j));
            if let Some(m) = n.minus(j) {
                need.insert(m);
            }
        }
    }
    need.into_iter().collect()
}

/// Table entries at the given indices together with the solutions used.
///
/// `a_{n,j} = h_{n,j}/h_{n−e_j,j}` (zero when `n_j = 0`). `b_{n,j}` comes from
/// the subleading monic coefficients and is cross-checked against
/// `∫x^{|n|+1}Q_{n+e_j} − ∫x^{|n|}Q_n`; a disagreement beyond the tolerance
/// scaled by the largest moment involved is an [`Error::InternalInconsistency`].
pub fn nnrr_entries(system: &AngelescoSystem, indices: &[MultiIndex]) -> Result<(NnrrTable, SolutionSet)> {
    let ctx = &system.ctx;
    let bits = ctx.bits();
    let need = support(indices);
    let top = need.iter().map(|n| n.size()).max().unwrap_or(0);
    if 2 * top + 2 > system.max_moment_order() {
        return Err(Error::Precondition(format!(
            "system moments cover |n| <= {}, table needs {}",
            (system.max_moment_order() - 2) / 2,
            top
        )));
    }
    let sols = system.solve_many(&need)?;
    let mut entries = BTreeMap::new();
    for &n in indices {
        let s = &sols[&n];
        let size = n.size();
        let mut a = [ctx.zero(), ctx.zero()];
        let mut b = [ctx.zero(), ctx.zero()];
        let mut disc = [ctx.zero(), ctx.zero()];
        for j in 1..=2 {
            if let Some(m) = n.minus(j) {
                a[j - 1] = Float::with_val(bits, s.h(j) / sols[&m].h(j));
            }
            let fwd = &sols[&n.plus(j)];
            let route_i = if size == 0 {
                -fwd.p_monic.coeff(0)
            } else {
                Float::with_val(bits, s.p_monic.coeff(size - 1) - fwd.p_monic.coeff(size))
            };
            let mut route_ii = system.form_moment(fwd, size + 1);
            if size > 0 {
                route_ii -= system.form_moment(s, size);
            }
            let scale = (1..=2)
                .map(|i| max_abs(&system.moments(i)[..=2 * size + 2], bits))
                .fold(ctx.one(), |x, y| x.max(&y));
            let d = Float::with_val(bits, &route_i - &route_ii).abs();
            if d > Float::with_val(bits, ctx.tol() * &scale) {
                return Err(Error::InternalInconsistency(format!(
                    "b_{{{n},{j}}} routes disagree by {:e}",
                    d.to_f64()
                )));
            }
            b[j - 1] = route_i;
            disc[j - 1] = d;
        }
        entries.insert(n, NnrrEntry { a, b, b_discrepancy: disc });
    }
    Ok((NnrrTable { entries }, sols))
}

/// Full table for all `n` with `n1, n2 ≤ n_max`.
pub fn nnrr_table(geometry: &Geometry, weights: &[WeightSpec; 2], n_max: usize, ctx: &PrecisionContext) -> Result<NnrrTable> {
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let system = AngelescoSystem::new(geometry.clone(), weights.clone(), 2 * n_max + 1, ctx)?;
    let grid: Vec<MultiIndex> = (0..=n_max)
        .flat_map(|n1| (0..=n_max).map(move |n2| MultiIndex::new(n1, n2)))
        .collect();
    Ok(nnrr_entries(&system, &grid)?.0)
}

/// Max absolute coefficient of
/// `zP_n − P_{n+e_j} − b_{n,j}P_n − a_{n,1}P_{n−e_1} − a_{n,2}P_{n−e_2}`.
pub fn recurrence_residual(table: &NnrrTable, solutions: &SolutionSet, n: MultiIndex, j: usize) -> Result<XReal> {
    Ok(recurrence_defect(table, solutions, n, j)?.0)
}

/// Same residual divided by the largest coefficient of `zP_n`.
pub fn recurrence_residual_relative(table: &NnrrTable, solutions: &SolutionSet, n: MultiIndex, j: usize) -> Result<XReal> {
    let (r, scale) = recurrence_defect(table, solutions, n, j)?;
    Ok(r / scale)
}

fn recurrence_defect(table: &NnrrTable, solutions: &SolutionSet, n: MultiIndex, j: usize) -> Result<(XReal, XReal)> {
    let missing = |m: MultiIndex| Error::Source { n1: m.n1, n2: m.n2 };
    let e = table.get(n).ok_or_else(|| missing(n))?;
    let p = &solutions.get(&n).ok_or_else(|| missing(n))?.p_monic;
    let fwd = &solutions.get(&n.plus(j)).ok_or_else(|| missing(n.plus(j)))?.p_monic;
    let zp = p.shift_up();
    let mut r = zp.sub(fwd).sub(&p.scale(&e.b[j - 1]));
    for i in 1..=2 {
        if let Some(m) = n.minus(i) {
            let pm = &solutions.get(&m).ok_or_else(|| missing(m))?.p_monic;
            r = r.sub(&pm.scale(&e.a[i - 1]));
        }
    }
    Ok((r.max_abs_coeff(), zp.max_abs_coeff()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_b_values_are_first_moment_ratios() {
        let ctx = PrecisionContext::new(256).unwrap();
        let sys = AngelescoSystem::reference(4, &ctx).unwrap();
        let (t, _) = nnrr_entries(&sys, &[MultiIndex::new(0, 0)]).unwrap();
        assert!((t.b(MultiIndex::new(0, 0), 1).unwrap().to_f64() + 1.5).abs() < 1e-70);
        assert!((t.b(MultiIndex::new(0, 0), 2).unwrap().to_f64() - 1.5).abs() < 1e-70);
        assert!(t.a(MultiIndex::new(0, 0), 1).unwrap().is_zero());
    }

    #[test]
    fn symmetric_a_values_at_one_one() {
        let ctx = PrecisionContext::new(256).unwrap();
        let sys = AngelescoSystem::reference(4, &ctx).unwrap();
        let n = MultiIndex::new(1, 1);
        let (t, _) = nnrr_entries(&sys, &[n]).unwrap();
        let (a1, a2) = (t.a(n, 1).unwrap(), t.a(n, 2).unwrap());
        assert!(*a1 > 0);
        assert!(Float::with_val(256, a1 - a2).abs() < 1e-70);
    }

    #[test]
    fn csv_round_trip() {
        let ctx = PrecisionContext::new(256).unwrap();
        let g = Geometry::reference(&ctx);
        let w = [WeightSpec::lebesgue(1), WeightSpec::lebesgue(2)];
        let t = nnrr_table(&g, &w, 2, &ctx).unwrap();
        let csv = t.to_csv(40);
        assert!(csv.starts_with("n1,n2,a1,a2,b1,b2\n"));
        assert_eq!(csv.lines().count(), 10);
        let back = NnrrTable::from_csv(&csv, &ctx).unwrap();
        assert_eq!(back.to_csv(40), csv);
    }

    #[test]
    fn too_few_moments_is_a_precondition_error() {
        let ctx = PrecisionContext::new(256).unwrap();
        let sys = AngelescoSystem::reference(2, &ctx).unwrap();
        let e = nnrr_entries(&sys, &[MultiIndex::new(3, 3)]);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
