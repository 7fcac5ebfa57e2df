//! Value parsers for the compact flag syntaxes.

use anyhow::{anyhow, bail, Context, Result};
use opengossip::{InitialState, MomentVector, Schedule};

fn floats(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("not a number: {s:?}")))
        .collect()
}

fn split(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((k, v)) => (k, Some(v)),
        None => (s, None),
    }
}

/// `constant:P`, `fixed-rate:LA,LG`, `linear-rate:LR,LG`, `harmonic` or
/// `table:P1,P2,...`.
pub fn schedule(s: &str) -> Result<Schedule> {
    let (kind, rest) = split(s);
    let args = rest.map(floats).transpose()?.unwrap_or_default();
    let want = |k: usize| -> Result<()> {
        if args.len() != k {
            bail!("schedule {kind:?} takes {k} value(s), got {}", args.len());
        }
        Ok(())
    };
    let sched = match kind {
        "constant" => {
            want(1)?;
            Schedule::Constant { p: args[0] }
        }
        "fixed-rate" => {
            want(2)?;
            Schedule::FixedArrivalRate {
                lambda_a: args[0],
                lambda_g: args[1],
            }
        }
        "linear-rate" => {
            want(2)?;
            Schedule::LinearArrivalRate {
                lambda_r: args[0],
                lambda_g: args[1],
            }
        }
        "harmonic" => {
            want(0)?;
            Schedule::Harmonic
        }
        "table" => Schedule::Table { values: args },
        other => bail!("unknown schedule {other:?} (constant, fixed-rate, linear-rate, harmonic, table)"),
    };
    sched.validate()?;
    Ok(sched)
}

/// `iid`, `consensus:C` or `values:X1,X2,...`.
pub fn init(s: &str) -> Result<InitialState> {
    match split(s) {
        ("iid", None) => Ok(InitialState::Iid),
        ("consensus", Some(v)) => Ok(InitialState::Consensus {
            value: v.trim().parse().with_context(|| format!("not a number: {v:?}"))?,
        }),
        ("values", Some(v)) => Ok(InitialState::Explicit { values: floats(v)? }),
        _ => Err(anyhow!("unknown initial state {s:?} (iid, consensus:C, values:X1,X2,...)")),
    }
}

/// `SQ_MEAN,MEAN_SQ`.
pub fn moments(s: &str) -> Result<MomentVector> {
    match floats(s)?.as_slice() {
        &[sq, ms] => Ok(MomentVector::new(sq, ms)),
        _ => bail!("expected SQ_MEAN,MEAN_SQ, got {s:?}"),
    }
}
