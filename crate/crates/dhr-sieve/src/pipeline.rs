//! One-call orchestration per sieve dimension.
//!
//! Everything expensive on the analytic side (sigma, the sieve pair
//! (alpha, beta), the F/f segment tables) depends only on kappa, so a
//! table run solves each column's delay system once and reuses it for
//! every degree h in that column. [`SolvedKappa`] owns that per-column
//! state and transparently escalates the working precision when an
//! enclosure comes out too wide to certify a floor. [`rmin_table`] fans
//! the columns out over the worker pool.

use crate::alphabeta::{critical_pair, CriticalPair};
use crate::dde::ff::FF;
use crate::dde::pfn::PFn;
use crate::dde::pixi::PiXi;
use crate::dde::sigma::SigmaFn;
use crate::dde::SieveContext;
use crate::interval::Interval;
use crate::optimize::{self, OptimResult, RSolver};
use crate::par;

/// How many precision doublings one dimension may spend in total.
const MAX_ESCALATIONS: u32 = 4;

/// Reusable per-dimension state: one delay-system solve serves every h.
pub struct SolvedKappa {
    kappa: u32,
    prec: u32,
    escalations: u32,
    vmax: Option<f64>,
    ctx: SieveContext,
    sf: SigmaFn,
    pair: CriticalPair,
    ff: FF,
    rs: RSolver,
}

impl SolvedKappa {
    /// Solves the dimension-kappa delay system at the default precision,
    /// doubling it on precision failures. Requires kappa >= 2; the linear
    /// sieve is classical and handled by [`optimize::admissible_r`].
    pub fn new(kappa: u32) -> crate::Result<SolvedKappa> {
        let prec = (12 * (kappa + 10)).max(53);
        SolvedKappa::with_escalation(kappa, prec)
    }

    /// Like [`SolvedKappa::new`] with an explicit starting precision.
    pub fn with_prec(kappa: u32, prec: u32) -> crate::Result<SolvedKappa> {
        SolvedKappa::with_escalation(kappa, prec.max(53))
    }

    fn with_escalation(kappa: u32, prec0: u32) -> crate::Result<SolvedKappa> {
        let mut prec = prec0;
        let mut escalations = 0;
        loop {
            match SolvedKappa::build(kappa, prec, escalations) {
                Err(crate::Error::Precision(m)) if escalations < MAX_ESCALATIONS => {
                    escalations += 1;
                    prec *= 2;
                    let _ = m;
                }
                other => return other,
            }
        }
    }

    fn build(kappa: u32, prec: u32, escalations: u32) -> crate::Result<SolvedKappa> {
        let ctx = SieveContext::with_prec(kappa, prec)?;
        let mut sf = SigmaFn::new(&ctx);
        let mut pf = PFn::new(&ctx);
        let mut px = PiXi::new(&ctx)?;
        let pair = critical_pair(&ctx, &mut sf, &mut pf, &mut px)?;
        let ff = FF::new(&ctx, &pair)?;
        let rs = RSolver::new(&ctx, &pair, &ff, &mut sf)?;
        Ok(SolvedKappa {
            kappa,
            prec,
            escalations,
            vmax: None,
            ctx,
            sf,
            pair,
            ff,
            rs,
        })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// The shared per-dimension constants behind this solve.
    pub fn context(&self) -> &SieveContext {
        &self.ctx
    }

    /// Working precision of the current state, after any escalations.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// How many times the precision has been doubled so far.
    pub fn escalations(&self) -> u32 {
        self.escalations
    }

    /// Certified enclosure of the upper sieving limit alpha.
    pub fn alpha(&self) -> &Interval {
        &self.pair.alpha
    }

    /// Certified enclosure of the lower sieving limit beta.
    pub fn beta(&self) -> &Interval {
        &self.pair.beta
    }

    /// Overrides the v search bound for subsequent minimisations.
    pub fn set_vmax(&mut self, vmax: f64) {
        self.vmax = Some(vmax);
        self.rs.set_vmax(vmax);
    }

    /// Minimises R over (v, w) for degree h and certifies the floor,
    /// escalating the working precision if an enclosure is too wide.
    pub fn minimize(&mut self, h: u32) -> crate::Result<OptimResult> {
        loop {
            let attempt = self.rs.minimize_r(h, &mut self.ff, &mut self.sf);
            match attempt {
                Err(crate::Error::Precision(m)) => {
                    if self.escalations >= MAX_ESCALATIONS {
                        return Err(crate::Error::Precision(m));
                    }
                    let rebuilt = SolvedKappa::build(
                        self.kappa,
                        self.prec * 2,
                        self.escalations + 1,
                    )?;
                    *self = rebuilt;
                    if let Some(vmax) = self.vmax {
                        self.rs.set_vmax(vmax);
                    }
                }
                other => return other,
            }
        }
    }
}

/// One emitted table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub kappa: u32,
    pub h: u32,
    pub r: u32,
}

/// Whether the published table populates the (kappa, h) cell: a degree-h
/// polynomial with kappa irreducible factors of degree at most 3 needs
/// kappa <= h <= 3 kappa.
pub fn populated(kappa: u32, h: u32) -> bool {
    kappa >= 1 && kappa <= h && h <= 3 * kappa
}

fn cell_context(e: crate::Error, kappa: u32, h: u32) -> crate::Error {
    let tag = |m: String| format!("kappa={kappa} h={h}: {m}");
    match e {
        crate::Error::Domain(m) => crate::Error::Domain(tag(m)),
        crate::Error::Usage(m) => crate::Error::Usage(tag(m)),
        crate::Error::Compute(m) => crate::Error::Compute(tag(m)),
        crate::Error::Precision(m) => crate::Error::Precision(tag(m)),
        crate::Error::AmbiguousBoundary(m) => crate::Error::AmbiguousBoundary(tag(m)),
        crate::Error::InvalidSystem(m) => crate::Error::InvalidSystem(tag(m)),
        crate::Error::Budget(m) => crate::Error::Budget(tag(m)),
    }
}

/// One solved table column with its precision history.
#[derive(Clone, Debug)]
pub struct ColumnReport {
    pub kappa: u32,
    /// Final working precision; 0 for the classical kappa = 1 column.
    pub prec: u32,
    /// Precision doublings spent across the whole column.
    pub escalations: u32,
    pub cells: Vec<TableCell>,
}

/// Solves one table column: every populated h <= hmax for this kappa,
/// sharing a single delay-system solve. The kappa = 1 column uses the
/// classical closed form and reports zero working precision.
pub fn solve_column(
    kappa: u32,
    hmax: u32,
    bits: Option<u32>,
    vmax: Option<f64>,
) -> crate::Result<ColumnReport> {
    let hs: Vec<u32> = (kappa..=hmax.min(3 * kappa)).collect();
    if kappa == 1 {
        let cells = hs
            .into_iter()
            .map(|h| {
                optimize::admissible_r(1, h)
                    .map(|r| TableCell { kappa: 1, h, r })
                    .map_err(|e| cell_context(e, 1, h))
            })
            .collect::<crate::Result<Vec<TableCell>>>()?;
        return Ok(ColumnReport {
            kappa: 1,
            prec: 0,
            escalations: 0,
            cells,
        });
    }
    let mut solved = match bits {
        Some(b) => SolvedKappa::with_prec(kappa, b),
        None => SolvedKappa::new(kappa),
    }
    .map_err(|e| cell_context(e, kappa, kappa))?;
    if let Some(v) = vmax {
        solved.set_vmax(v);
    }
    let mut cells = Vec::with_capacity(hs.len());
    for h in hs {
        let res = solved.minimize(h).map_err(|e| cell_context(e, kappa, h))?;
        cells.push(TableCell {
            kappa,
            h,
            r: res.r,
        });
    }
    Ok(ColumnReport {
        kappa,
        prec: solved.prec(),
        escalations: solved.escalations(),
        cells,
    })
}

/// Solves every column with kappa <= hmax on the worker pool (one
/// delay-system solve per kappa), returned in kappa order regardless of
/// thread count.
pub fn table_columns(
    hmax: u32,
    bits: Option<u32>,
    vmax: Option<f64>,
) -> crate::Result<Vec<ColumnReport>> {
    if hmax == 0 {
        return Err(crate::Error::Usage("the table needs hmax >= 1".into()));
    }
    let kappas: Vec<u32> = (1..=hmax).collect();
    par::par_map(kappas, |k| solve_column(k, hmax, bits, vmax))
        .into_iter()
        .collect()
}

/// Every populated cell with h <= hmax, sorted by (h, kappa).
pub fn rmin_table(
    hmax: u32,
    bits: Option<u32>,
    vmax: Option<f64>,
) -> crate::Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    for col in table_columns(hmax, bits, vmax)? {
        cells.extend(col.cells);
    }
    cells.sort_by_key(|c| (c.h, c.kappa));
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn populated_matches_the_published_shape() {
        // Row h lists kappa from ceil(h/3) to h.
        for h in 1..=20u32 {
            for kappa in 1..=h {
                let expect = 3 * kappa >= h;
                assert_eq!(populated(kappa, h), expect, "kappa={kappa} h={h}");
            }
            assert!(!populated(h + 1, h));
        }
        assert!(!populated(0, 3));
    }

    #[test]
    fn a_column_reuses_one_solve_for_every_h() {
        let mut solved = SolvedKappa::new(2).unwrap();
        let r22 = solved.minimize(2).unwrap();
        let r25 = solved.minimize(5).unwrap();
        let r26 = solved.minimize(6).unwrap();
        assert_eq!(r22.r, 5);
        assert_eq!(r25.r, 8);
        assert_eq!(r26.r, 9);
        assert_eq!(solved.escalations(), 0);
        // alpha/beta match the dimension-2 pair to interval accuracy.
        let a = solved.alpha().to_f64();
        let b = solved.beta().to_f64();
        assert!((a - 5.357_727_445_594_461_8).abs() < 1e-12);
        assert!((b - 4.266_450_284_148_641_9).abs() < 1e-12);
    }

    #[test]
    fn small_table_matches_the_published_rows() {
        let cells = rmin_table(4, None, None).unwrap();
        let want = vec![
            TableCell { kappa: 1, h: 1, r: 1 },
            TableCell { kappa: 1, h: 2, r: 2 },
            TableCell { kappa: 2, h: 2, r: 5 },
            TableCell { kappa: 1, h: 3, r: 4 },
            TableCell { kappa: 2, h: 3, r: 6 },
            TableCell { kappa: 3, h: 3, r: 8 },
            TableCell { kappa: 2, h: 4, r: 7 },
            TableCell { kappa: 3, h: 4, r: 10 },
            TableCell { kappa: 4, h: 4, r: 12 },
        ];
        assert_eq!(cells, want);
    }

    #[test]
    fn table_rejects_an_empty_range() {
        assert!(matches!(
            rmin_table(0, None, None),
            Err(crate::Error::Usage(_))
        ));
    }
}
