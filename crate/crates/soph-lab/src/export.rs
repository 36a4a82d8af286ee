//! CSV exports of the derived tables. Every file starts with a header
//! line embedding the config hash; writers refuse to overwrite a file
//! produced under a different config.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lab::Lab;
use crate::soph::statistic_pk;
use crate::tables::Mode;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{file} was written under config {found}, current config is {expected}")]
    ConfigMismatch { file: String, found: String, expected: String },
}

fn header(hash: &str) -> String {
    format!("# soph-lab v1; config={hash}\n")
}

/// Refuse to clobber artifacts from a different config.
fn guard(path: &Path, hash: &str) -> Result<(), ExportError> {
    let Ok(existing) = fs::read_to_string(path) else {
        return Ok(());
    };
    let Some(first) = existing.lines().next() else {
        return Ok(());
    };
    if let Some(found) = first.split("config=").nth(1) {
        if found != hash {
            return Err(ExportError::ConfigMismatch {
                file: path.display().to_string(),
                found: found.to_string(),
                expected: hash.to_string(),
            });
        }
    }
    Ok(())
}

fn write_file(path: &Path, hash: &str, body: &str) -> Result<(), ExportError> {
    guard(path, hash)?;
    fs::write(path, format!("{}{}", header(hash), body))?;
    Ok(())
}

/// `k_table.csv` and `bb.csv`: mode independent.
pub fn write_base_tables(dir: &Path, lab: &Lab) -> Result<Vec<PathBuf>, ExportError> {
    let hash = lab.config.hash_hex();
    let mut written = Vec::new();

    let mut body = String::from("x,K,witness,firstTime\n");
    for (x, row) in lab.tables.k_table.iter() {
        let _ = writeln!(body, "{x},{},{},{}", row.k_value, row.witness, row.first_time);
    }
    let path = dir.join("k_table.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    let mut body = String::from("n,bbOut,bbTime\n");
    for n in 0..=lab.tables.l_max as usize {
        let _ = writeln!(body, "{n},{},{}", lab.tables.bb.out_values[n], lab.tables.bb.time_values[n]);
    }
    let path = dir.join("bb.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    Ok(written)
}

/// Per-mode `omega.csv` and `tn.csv` under `dir/<mode>/`.
pub fn write_omega_tables(dir: &Path, lab: &Lab, mode: Mode) -> Result<Vec<PathBuf>, ExportError> {
    let hash = lab.config.hash_hex();
    let mode_dir = dir.join(mode.label());
    fs::create_dir_all(&mode_dir)?;
    let mut written = Vec::new();
    let omega = lab.tables.omega(mode);

    let mut body = String::from("t,omega\n");
    for (t, cum) in omega.breakpoints() {
        let _ = writeln!(body, "{t},{cum}");
    }
    let path = mode_dir.join("omega.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    let mut body = String::from("n,t_n\n");
    for (n, t) in omega.t_n_entries().iter().enumerate() {
        let _ = writeln!(body, "{n},{t}");
    }
    let path = mode_dir.join("tn.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    let mut body = String::from("t,x,delta\n");
    for ev in &lab.tables.trace(mode).events {
        let _ = writeln!(body, "{},{},{}", ev.t, ev.x, ev.delta);
    }
    let path = mode_dir.join("events.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    Ok(written)
}

/// Per-mode `soph.csv` and the `statistic_<k>.csv` family.
pub fn write_soph_tables(dir: &Path, lab: &Lab, mode: Mode) -> Result<Vec<PathBuf>, ExportError> {
    let hash = lab.config.hash_hex();
    let mode_dir = dir.join(mode.label());
    fs::create_dir_all(&mode_dir)?;
    let mut written = Vec::new();
    let soph = lab.soph(mode);

    let kc_cols: String =
        (0..=lab.config.c_max).map(|c| format!(",kc{c}")).collect::<Vec<_>>().join("");
    let mut body = format!("x,K{kc_cols},kPrime,d,coarse\n");
    for (x, rec) in soph.iter() {
        let kcs: String = rec.k_c.iter().map(|k| format!(",{k}")).collect();
        let _ = writeln!(
            body,
            "{x},{}{kcs},{},{},{}",
            rec.k_value, rec.k_prime, rec.sumtest_d, rec.coarse
        );
    }
    let path = mode_dir.join("soph.csv");
    write_file(&path, &hash, &body)?;
    written.push(path);

    let n_sat = lab.tables.omega(mode).n_sat;
    for k in 1..=n_sat + 1 {
        let Ok(stat) = statistic_pk(&lab.tables, mode, k, lab.config.c_p) else {
            continue;
        };
        let (pow2, denom) = stat.implied_n();
        let mut body = String::from("x,delta,z,impliedN\n");
        for (x, delta) in stat.entries() {
            let _ = writeln!(body, "{x},{delta},{},2^{pow2}/{denom}", stat.z);
        }
        let path = mode_dir.join(format!("statistic_{k}.csv"));
        write_file(&path, &hash, &body)?;
        written.push(path);
    }

    Ok(written)
}

/// Everything: base tables plus per-mode omega and sophistication files.
pub fn write_all(dir: &Path, lab: &Lab) -> Result<Vec<PathBuf>, ExportError> {
    fs::create_dir_all(dir)?;
    let mut written = write_base_tables(dir, lab)?;
    for &mode in lab.config.modes.modes() {
        written.extend(write_omega_tables(dir, lab, mode)?);
        written.extend(write_soph_tables(dir, lab, mode)?);
    }
    Ok(written)
}
