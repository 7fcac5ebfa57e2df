use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use opengossip::report::RunReport;

/// A file when a path is given, stdout otherwise.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_report(report: &RunReport, path: Option<&Path>) -> Result<()> {
    let json = report.to_json()?;
    let mut w = sink(path)?;
    writeln!(w, "{json}")?;
    w.flush()?;
    Ok(())
}
