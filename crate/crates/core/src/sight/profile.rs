use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Fixed,
    #[default]
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileStation {
    pub s: f64,
    pub available_d: f64,
    /// `None` until a demand model fills it, or when braking is infeasible.
    pub required_d: Option<f64>,
    pub infeasible: bool,
    pub deficit: bool,
    /// One flag per configured fixed distance.
    pub visible_at: Vec<bool>,
}

impl ProfileStation {
    pub fn new(s: f64, available_d: f64, visible_at: Vec<bool>) -> Self {
        ProfileStation {
            s,
            available_d,
            required_d: None,
            infeasible: false,
            deficit: false,
            visible_at,
        }
    }

    /// Sets the required distance; `None` marks the station as braking-infeasible.
    pub fn set_required(&mut self, required: Option<f64>) {
        self.required_d = required;
        self.infeasible = required.is_none();
        self.deficit = matches!(required, Some(r) if self.available_d < r);
    }
}

/// Available (and, once filled, required) sight distance per station.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityProfile {
    pub mode: SweepMode,
    pub cap: f64,
    /// Fixed distances checked per station (empty in max mode).
    pub distances: Vec<f64>,
    pub stations: Vec<ProfileStation>,
}

pub fn distance_label(d: f64) -> String {
    if d.fract() == 0.0 && d.abs() < 1e15 {
        format!("{d:.0}")
    } else {
        format!("{d}")
    }
}

fn fmt3(x: f64) -> String {
    let r = round3(x);
    format!("{:.3}", if r == 0.0 { 0.0 } else { r })
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

impl VisibilityProfile {
    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["s", "available_m", "required_m", "deficit"]
            .iter()
            .map(|c| c.to_string())
            .collect();
        h.extend(self.distances.iter().map(|&d| format!("vis_at_{}", distance_label(d))));
        h
    }

    /// CSV with three fractional digits; an empty `required_m` cell means the
    /// demand is unknown or braking is infeasible.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.csv_header().join(","))?;
        for st in &self.stations {
            let mut cells = vec![
                fmt3(st.s),
                fmt3(st.available_d),
                st.required_d.map(fmt3).unwrap_or_default(),
                st.deficit.to_string(),
            ];
            cells.extend(st.visible_at.iter().map(|v| v.to_string()));
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// JSON mirror of the CSV, one object per station with the CSV column names.
    pub fn to_json(&self) -> Value {
        let labels: Vec<String> = self
            .distances
            .iter()
            .map(|&d| format!("vis_at_{}", distance_label(d)))
            .collect();
        let stations: Vec<Value> = self
            .stations
            .iter()
            .map(|st| {
                let mut row = Map::new();
                row.insert("s".into(), json!(round3(st.s)));
                row.insert("available_m".into(), json!(round3(st.available_d)));
                row.insert("required_m".into(), json!(st.required_d.map(round3)));
                row.insert("deficit".into(), json!(st.deficit));
                row.insert("infeasible".into(), json!(st.infeasible));
                for (label, v) in labels.iter().zip(&st.visible_at) {
                    row.insert(label.clone(), json!(v));
                }
                Value::Object(row)
            })
            .collect();
        json!({
            "mode": self.mode,
            "cap": round3(self.cap),
            "distances": self.distances,
            "stations": stations,
        })
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.to_json()).map_err(|source| Error::Json {
            context: "visibility profile".into(),
            source,
        })
    }
}
