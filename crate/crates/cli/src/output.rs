//! CSV records and gnuplot blocks.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the in-memory values bit for bit.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use zoneshare::analytic::{AdrReport, CoverageCurve};
use zoneshare::model::QosWeights;
use zoneshare::simulator::SceneNode;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    #[serde(rename = "threshold_dB")]
    pub threshold_db: f64,
    pub class: String,
    pub engine: String,
    pub probability: f64,
    /// Empty for analytic rows.
    pub ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdrRow {
    pub rp_m: f64,
    pub omega_s: f64,
    pub adr_ns: f64,
    pub adr_nr: f64,
    pub adr_t: f64,
    pub ws_adr: f64,
    pub feasible: bool,
}

impl From<&AdrReport> for AdrRow {
    fn from(r: &AdrReport) -> Self {
        AdrRow {
            rp_m: r.operating_point.protection_radius,
            omega_s: r.operating_point.shared_fraction,
            adr_ns: r.adr_ntn_shared,
            adr_nr: r.adr_ntn_reserved,
            adr_t: r.adr_tn,
            ws_adr: r.ws_adr,
            feasible: r.feasible(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRow {
    pub kind: String,
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub distance_m: f64,
    pub fading: f64,
    pub cochannel: bool,
    /// Empty for base stations.
    pub shared_active: Option<bool>,
}

impl From<&SceneNode> for SceneRow {
    fn from(n: &SceneNode) -> Self {
        SceneRow {
            kind: n.kind.label().to_string(),
            x_m: n.position[0],
            y_m: n.position[1],
            z_m: n.position[2],
            distance_m: n.distance,
            fading: n.fading,
            cochannel: n.cochannel,
            shared_active: n.shared_active,
        }
    }
}

/// Rows ordered by class, then engine, then threshold.
pub fn coverage_rows(curves: &[CoverageCurve], thresholds_db: &[f64]) -> Vec<CoverageRow> {
    let mut curves: Vec<&CoverageCurve> = curves.iter().collect();
    curves.sort_by_key(|c| (c.user_class, c.source.label()));
    curves
        .into_iter()
        .flat_map(|c| {
            c.points.iter().zip(thresholds_db).map(move |(p, &db)| CoverageRow {
                threshold_db: db,
                class: c.user_class.label().to_string(),
                engine: c.source.label().to_string(),
                probability: p.probability,
                ci_halfwidth: p.half_width,
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(input: impl Read) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

/// Reads an ADR table and checks every ws_adr against the weighted sum of
/// its row.
pub fn read_adr_csv(input: impl Read, weights: &QosWeights) -> Result<Vec<AdrRow>, CliError> {
    let rows: Vec<AdrRow> = read_csv(input)?;
    for (i, r) in rows.iter().enumerate() {
        let expected = weights.weighted_sum(r.adr_ns, r.adr_nr, r.adr_t);
        if r.ws_adr != expected {
            return Err(CliError::Output(format!(
                "row {}: ws_adr {} differs from the weighted sum {}",
                i + 1,
                r.ws_adr,
                expected
            )));
        }
    }
    Ok(rows)
}

/// One block per (class, engine), separated by two blank lines so gnuplot
/// can address them with `index`.
pub fn write_coverage_gnuplot(rows: &[CoverageRow], mut out: impl Write) -> std::io::Result<()> {
    let mut current: Option<(&str, &str)> = None;
    for r in rows {
        let key = (r.class.as_str(), r.engine.as_str());
        if current != Some(key) {
            if current.is_some() {
                writeln!(out, "\n")?;
            }
            writeln!(out, "# class={} engine={}", r.class, r.engine)?;
            writeln!(out, "# threshold_dB probability ci_halfwidth")?;
            current = Some(key);
        }
        let hw = r.ci_halfwidth.map_or("NaN".to_string(), |h| h.to_string());
        writeln!(out, "{} {} {}", r.threshold_db, r.probability, hw)?;
    }
    Ok(())
}

/// Grid layout for `splot`: one blank line after each R_p row.
pub fn write_adr_gnuplot(rows: &[AdrRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# rp_m omega_s adr_ns adr_nr adr_t ws_adr feasible")?;
    for (i, r) in rows.iter().enumerate() {
        if i > 0 && rows[i - 1].rp_m != r.rp_m {
            writeln!(out)?;
        }
        writeln!(
            out,
            "{} {} {} {} {} {} {}",
            r.rp_m, r.omega_s, r.adr_ns, r.adr_nr, r.adr_t, r.ws_adr, r.feasible as u8
        )?;
    }
    Ok(())
}
