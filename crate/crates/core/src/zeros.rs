//! Critical-line zero location and completeness certification.
//!
//! zeta_K factors as zeta * L(chi_D), so each factor is scanned on its own
//! Hardy-style trace: near-coincident zeros of different factors (the usual
//! scanning hazard) are then found independently and merged. Completeness is
//! judged per factor against the phase count theta_f(T)/pi + offset, rounded
//! to the integer whose parity matches the trace sign at T, which absorbs
//! phase fluctuations up to |S(T)| < 1 rather than the naive 1/2.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::completion::{phase, phase_deriv, scaled_trace};
use crate::error::{Error, Result};
use crate::fields::{FieldDescriptor, QuadraticCharacter};
use crate::lfun::dirichlet_l;
use crate::numerics::log_gamma;

use std::f64::consts::PI;

/// Bisection width target for every stored ordinate.
pub const REFINE_TOL: f64 = 1e-9;
/// Scan heights accepted by this build (matches the evaluation engine's
/// validated range with margin for counting probes).
pub const MIN_SCAN_HEIGHT: f64 = 2.0;
pub const MAX_SCAN_HEIGHT: f64 = 600.0;

/// Grid cap: no spacing coarser than this, so consecutive zeros of one
/// factor separated by more than the cap can never share a cell (the
/// closest known zeta pair below height 600 is 0.4365 apart).
const MAX_GRID_STEP: f64 = 0.42;
const MIN_GRID_STEP: f64 = 0.01;
/// Probe offsets for the neighbor-consistency check of the phase count.
const COUNT_PROBES: [f64; 5] = [0.0, -0.011, 0.011, -0.022, 0.022];
/// A probe this close to a zero (trace units are O(zeta)) is discarded.
const PROBE_DEAD_ZONE: f64 = 1e-7;
/// Shift applied when the count at T itself is unstable.
const COUNT_NUDGE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LedgerStatus {
    CertifiedComplete,
    CountMismatch,
    Unrefined,
}

impl fmt::Display for LedgerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LedgerStatus::CertifiedComplete => "certified-complete",
            LedgerStatus::CountMismatch => "count-mismatch",
            LedgerStatus::Unrefined => "unrefined",
        })
    }
}

impl FromStr for LedgerStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified-complete" => Ok(LedgerStatus::CertifiedComplete),
            "count-mismatch" => Ok(LedgerStatus::CountMismatch),
            "unrefined" => Ok(LedgerStatus::Unrefined),
            other => Err(Error::Domain(format!("unknown ledger status {other:?}"))),
        }
    }
}

/// Zeros of zeta_K with ordinate in (0, T], refined and completeness-tagged.
#[derive(Clone, Debug)]
pub struct ZeroLedger {
    field: FieldDescriptor,
    height: f64,
    ordinates: Vec<f64>,
    refine_tol: f64,
    status: LedgerStatus,
}

/// Nearest 15-significant-digit value, the precision of the ledger text
/// format; applying it at construction makes a freshly scanned ledger
/// bit-identical to its written-then-parsed image.
pub(crate) fn round_sig15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap()
}

impl ZeroLedger {
    pub fn new(
        field: FieldDescriptor,
        height: f64,
        mut ordinates: Vec<f64>,
        refine_tol: f64,
        status: LedgerStatus,
    ) -> Result<Self> {
        if !height.is_finite() || height <= 0.0 {
            return Err(Error::Domain(format!("ledger height {height} invalid")));
        }
        if !(refine_tol.is_finite() && refine_tol > 0.0) {
            return Err(Error::Domain(format!("refine_tol {refine_tol} invalid")));
        }
        for g in &mut ordinates {
            *g = round_sig15(*g);
        }
        for w in ordinates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Domain(format!(
                    "ordinates not strictly ascending near {}",
                    w[0]
                )));
            }
        }
        if let Some(&g) = ordinates.first() {
            if g <= 0.0 {
                return Err(Error::Domain(format!("non-positive ordinate {g}")));
            }
        }
        if let Some(&g) = ordinates.last() {
            if g > height {
                return Err(Error::Domain(format!(
                    "ordinate {g} exceeds ledger height {height}"
                )));
            }
        }
        Ok(ZeroLedger {
            field,
            height,
            ordinates,
            refine_tol,
            status,
        })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }
    pub fn refine_tol(&self) -> f64 {
        self.refine_tol
    }
    pub fn status(&self) -> LedgerStatus {
        self.status
    }
}

/// One primitive factor of zeta_K on the critical line.
pub(crate) enum Factor {
    Zeta,
    Char(QuadraticCharacter),
}

impl Factor {
    /// Real-valued rescaled completed factor at 1/2 + it; sign changes
    /// exactly at the factor's critical-line zeros.
    fn trace(&self, t: f64) -> Result<f64> {
        match self {
            Factor::Zeta => scaled_trace(&FieldDescriptor::rationals(), t),
            Factor::Char(chi) => {
                let s = Complex64::new(0.5, t);
                let l = dirichlet_l(s, chi)?;
                let v = Complex64::from_polar(1.0, self.theta(t)?) * l;
                let allowance = 1e-9 * (1.0 + v.norm());
                if v.im.abs() > allowance {
                    return Err(Error::RealityViolation {
                        what: "completed L-factor on the critical line",
                        t,
                        im: v.im.abs(),
                        allowance,
                    });
                }
                Ok(v.re)
            }
        }
    }

    /// Continuous gamma-factor phase of this factor at 1/2 + it.
    fn theta(&self, t: f64) -> Result<f64> {
        match self {
            Factor::Zeta => phase(&FieldDescriptor::rationals(), t),
            Factor::Char(chi) => {
                let q = chi.modulus() as f64;
                let a = if chi.is_even() { 0.0 } else { 1.0 };
                let lg = log_gamma(Complex64::new(0.25 + a / 2.0, t / 2.0))?;
                Ok(0.5 * t * (q / PI).ln() + lg.im)
            }
        }
    }

    fn theta_deriv(&self, t: f64) -> Result<f64> {
        match self {
            Factor::Zeta => phase_deriv(&FieldDescriptor::rationals(), t),
            Factor::Char(chi) => {
                let q = chi.modulus() as f64;
                let a = if chi.is_even() { 0.0 } else { 1.0 };
                let dg = crate::numerics::digamma(Complex64::new(0.25 + a / 2.0, t / 2.0))?;
                Ok(0.5 * (q / PI).ln() + 0.5 * dg.re)
            }
        }
    }

    /// The polynomial factor s(s-1)/2 of xi contributes one unit to the
    /// zeta count (the classical +1); an L-factor contributes none.
    fn count_offset(&self) -> f64 {
        match self {
            Factor::Zeta => 1.0,
            Factor::Char(_) => 0.0,
        }
    }

    fn anchor_sign(&self) -> Result<f64> {
        let v = self.trace(0.0)?;
        if v.abs() < 1e-10 {
            return Err(Error::CountInstability { t: 0.0 });
        }
        Ok(v.signum())
    }
}

pub(crate) fn factors_of(field: &FieldDescriptor) -> Result<Vec<Factor>> {
    let mut factors = vec![Factor::Zeta];
    if !field.is_rational() {
        factors.push(Factor::Char(QuadraticCharacter::new(field.discriminant())?));
    }
    Ok(factors)
}

/// Phase-predicted zero count of one factor in (0, t], parity-locked to the
/// trace sign at t. None when t sits in the dead zone of a zero.
fn parity_count_at(factor: &Factor, anchor: f64, t: f64) -> Result<Option<usize>> {
    let v = factor.trace(t)?;
    if v.abs() < PROBE_DEAD_ZONE {
        return Ok(None);
    }
    // (-1)^count relates the trace sign at t to the sign at 0.
    let parity = if v.signum() == anchor { 0.0 } else { 1.0 };
    let raw = factor.theta(t)? / PI + factor.count_offset();
    let count = parity + 2.0 * ((raw - parity) / 2.0).round();
    Ok(Some(count.max(0.0) as usize))
}

/// Parity-corrected count with a neighbor-consistency check: all probes
/// near t that are not themselves sitting on a zero must agree.
fn stable_count(factor: &Factor, t: f64) -> Result<usize> {
    let anchor = factor.anchor_sign()?;
    let mut agreed: Option<usize> = None;
    for dt in COUNT_PROBES {
        let tp = t + dt;
        if tp <= 0.0 {
            continue;
        }
        let Some(n) = parity_count_at(factor, anchor, tp)? else {
            continue;
        };
        match agreed {
            None => agreed = Some(n),
            Some(m) if m != n => return Err(Error::CountInstability { t }),
            Some(_) => {}
        }
    }
    agreed.ok_or(Error::CountInstability { t })
}

/// Number of zeros of zeta_K with ordinate in (0, T], from the phase of the
/// completion factors (argument principle); no scanning involved.
pub fn expected_count(field: &FieldDescriptor, t: f64) -> Result<usize> {
    validate_height(t)?;
    let mut total = 0;
    for factor in factors_of(field)? {
        total += stable_count(&factor, t)?;
    }
    Ok(total)
}

/// Like stable_count but tolerant of an unlucky T: retries just below,
/// adding back the supplied ordinates that fall in the skipped window.
fn factor_count_with_nudge(factor: &Factor, t: f64, found: &[f64]) -> Result<Option<usize>> {
    match stable_count(factor, t) {
        Ok(n) => Ok(Some(n)),
        Err(Error::CountInstability { .. }) => {
            let t_low = t - COUNT_NUDGE;
            let back = found.iter().filter(|&&g| g > t_low).count();
            match stable_count(factor, t_low) {
                Ok(n) => Ok(Some(n + back)),
                Err(Error::CountInstability { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

/// Completeness verdict for a merged ordinate list at height t: the total
/// found must equal the summed phase counts of the factors.
pub fn certify(field: &FieldDescriptor, ordinates: &[f64], t: f64) -> Result<LedgerStatus> {
    validate_height(t)?;
    let mut expected = 0usize;
    for factor in factors_of(field)? {
        match factor_count_with_nudge(&factor, t, ordinates)? {
            Some(n) => expected += n,
            // Persistently unstable count: zero accounting failed.
            None => return Ok(LedgerStatus::CountMismatch),
        }
    }
    if expected == ordinates.len() {
        Ok(LedgerStatus::CertifiedComplete)
    } else {
        Ok(LedgerStatus::CountMismatch)
    }
}

fn validate_height(t: f64) -> Result<()> {
    if !t.is_finite() || !(MIN_SCAN_HEIGHT..=MAX_SCAN_HEIGHT).contains(&t) {
        return Err(Error::Domain(format!(
            "scan height {t} outside supported range [{MIN_SCAN_HEIGHT}, {MAX_SCAN_HEIGHT}]"
        )));
    }
    Ok(())
}

/// Sample grid over (0, t_max] with spacing 0.45 * pi / theta' (roughly
/// half the local mean zero gap), clamped, then divided for rescans.
fn build_grid(factor: &Factor, t_max: f64, divisor: f64) -> Result<Vec<f64>> {
    let mut grid = Vec::new();
    let mut t = 0.0;
    while t < t_max {
        grid.push(t);
        let density = factor.theta_deriv(t)?.max(1.0);
        let step = (0.45 * PI / density).clamp(MIN_GRID_STEP, MAX_GRID_STEP) / divisor;
        t += step;
    }
    grid.push(t_max);
    Ok(grid)
}

fn bisect(factor: &Factor, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..64 {
        if hi - lo <= REFINE_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = factor.trace(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One grid pass over a factor: evaluate traces in parallel, bracket sign
/// changes sequentially, bisect brackets in parallel.
fn grid_scan(factor: &Factor, t_max: f64, divisor: f64) -> Result<Vec<f64>> {
    let grid = build_grid(factor, t_max, divisor)?;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| factor.trace(t))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        if values[i] * values[i + 1] < 0.0 {
            brackets.push((grid[i], grid[i + 1], values[i]));
        }
    }
    let mut ordinates: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi, f_lo)| bisect(factor, lo, hi, f_lo))
        .collect::<Result<_>>()?;
    ordinates.sort_by(f64::total_cmp);
    // A rescan can re-find the same zero from abutting cells.
    ordinates.dedup_by(|a, b| (*a - *b).abs() < 3.0 * REFINE_TOL);
    Ok(ordinates)
}

/// Scan one factor to completeness: base grid first, then six- and
/// thirty-six-fold denser rescans if the phase count disagrees.
fn scan_factor(factor: &Factor, t_max: f64) -> Result<(Vec<f64>, bool)> {
    let mut last = Vec::new();
    for divisor in [1.0, 6.0, 36.0] {
        let ordinates = grid_scan(factor, t_max, divisor)?;
        let verdict = factor_count_with_nudge(factor, t_max, &ordinates)?;
        if verdict == Some(ordinates.len()) {
            return Ok((ordinates, true));
        }
        last = ordinates;
    }
    Ok((last, false))
}

/// Locate and refine all zeros of zeta_K with ordinate in (0, t_max],
/// factor by factor, and certify the merged list.
pub fn scan_zeros(field: &FieldDescriptor, t_max: f64) -> Result<ZeroLedger> {
    validate_height(t_max)?;
    let mut all = Vec::new();
    let mut complete = true;
    for factor in factors_of(field)? {
        let (ordinates, ok) = scan_factor(&factor, t_max)?;
        if !ok {
            complete = false;
        }
        all.extend(ordinates);
    }
    all.sort_by(f64::total_cmp);
    let status = if complete {
        LedgerStatus::CertifiedComplete
    } else {
        LedgerStatus::CountMismatch
    };
    ZeroLedger::new(field.clone(), t_max, all, REFINE_TOL, status)
}

/// Versioned text format shared with the command-line cache:
/// line 1 magic, line 2 field spec, line 3 metadata, then one ordinate per
/// line at 15 significant digits.
pub fn write_ledger(ledger: &ZeroLedger, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "ERHLEDGER v1")?;
    writeln!(out, "{}", ledger.field.spec())?;
    writeln!(
        out,
        "T={} tol={:e} status={}",
        ledger.height, ledger.refine_tol, ledger.status
    )?;
    for g in &ledger.ordinates {
        writeln!(out, "{g:.14e}")?;
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_ledger(path: &Path) -> Result<ZeroLedger> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines.next().ok_or(Error::LedgerFormat {
        line: 1,
        detail: "empty file".into(),
    })?;
    if magic != "ERHLEDGER v1" {
        return Err(Error::LedgerFormat {
            line: 1,
            detail: format!("bad magic {magic:?}"),
        });
    }

    let (_, spec) = lines.next().ok_or(Error::LedgerFormat {
        line: 2,
        detail: "missing field spec".into(),
    })?;
    let field: FieldDescriptor = spec.parse().map_err(|e| Error::LedgerFormat {
        line: 2,
        detail: format!("{e}"),
    })?;

    let (_, meta) = lines.next().ok_or(Error::LedgerFormat {
        line: 3,
        detail: "missing metadata line".into(),
    })?;
    let mut height = None;
    let mut tol = None;
    let mut status = None;
    for part in meta.split_whitespace() {
        let bad = || Error::LedgerFormat {
            line: 3,
            detail: format!("bad metadata token {part:?}"),
        };
        let (key, value) = part.split_once('=').ok_or_else(bad)?;
        match key {
            "T" => height = Some(value.parse::<f64>().map_err(|_| bad())?),
            "tol" => tol = Some(value.parse::<f64>().map_err(|_| bad())?),
            "status" => status = Some(value.parse::<LedgerStatus>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let missing = |what: &str| Error::LedgerFormat {
        line: 3,
        detail: format!("missing {what}"),
    };
    let height = height.ok_or_else(|| missing("T"))?;
    let tol = tol.ok_or_else(|| missing("tol"))?;
    let status = status.ok_or_else(|| missing("status"))?;

    let mut ordinates = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        ordinates.push(line.trim().parse::<f64>().map_err(|_| Error::LedgerFormat {
            line: idx + 1,
            detail: format!("bad ordinate {line:?}"),
        })?);
    }
    ZeroLedger::new(field, height, ordinates, tol, status).map_err(|e| Error::LedgerFormat {
        line: 0,
        detail: format!("{e}"),
    })
}
