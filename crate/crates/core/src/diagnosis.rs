//! Deficit detection and report export.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sight::VisibilityProfile;

/// Maximal run of stations where the available distance is below the required one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitSegment {
    pub s_start: f64,
    pub s_end: f64,
    /// Largest `required - available` over the run.
    pub worst_gap: f64,
    pub worst_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeficitReport {
    pub segments: Vec<DeficitSegment>,
    /// Stations where braking is infeasible; they are never part of a segment.
    pub infeasible_stations: Vec<f64>,
}

/// Deficit segments of every length. Infeasible-braking stations are listed
/// separately and end any run they interrupt.
pub fn find_deficits(profile: &VisibilityProfile) -> Result<DeficitReport> {
    find_deficits_min_length(profile, 0.0)
}

/// As [`find_deficits`], dropping segments shorter than `min_length` metres.
pub fn find_deficits_min_length(profile: &VisibilityProfile, min_length: f64) -> Result<DeficitReport> {
    if !(min_length >= 0.0) {
        return Err(Error::param("min_length", "must be nonnegative"));
    }
    let mut report = DeficitReport::default();
    let mut open: Option<DeficitSegment> = None;
    let close = |seg: Option<DeficitSegment>, out: &mut Vec<DeficitSegment>| {
        if let Some(seg) = seg {
            if seg.s_end - seg.s_start >= min_length {
                out.push(seg);
            }
        }
    };
    for st in &profile.stations {
        if st.infeasible {
            report.infeasible_stations.push(st.s);
            close(open.take(), &mut report.segments);
            continue;
        }
        let required = st.required_d.ok_or_else(|| {
            Error::param("profile", format!("no required distance at s = {:.3}", st.s))
        })?;
        if st.available_d < required {
            let gap = required - st.available_d;
            let seg = open.get_or_insert(DeficitSegment {
                s_start: st.s,
                s_end: st.s,
                worst_gap: gap,
                worst_s: st.s,
            });
            seg.s_end = st.s;
            if gap > seg.worst_gap {
                seg.worst_gap = gap;
                seg.worst_s = st.s;
            }
        } else {
            close(open.take(), &mut report.segments);
        }
    }
    close(open.take(), &mut report.segments);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub profile_csv: PathBuf,
    pub profile_json: PathBuf,
    pub deficits_json: PathBuf,
    pub plot_data: PathBuf,
}

impl ReportFiles {
    pub fn in_dir(dir: &Path) -> Self {
        ReportFiles {
            profile_csv: dir.join("profile.csv"),
            profile_json: dir.join("profile.json"),
            deficits_json: dir.join("deficits.json"),
            plot_data: dir.join("plot.dat"),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, w: BufWriter<File>) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .sync_all()
        .map_err(|e| Error::io(path, e))
}

/// Writes `profile.csv`, `profile.json`, `deficits.json` and `plot.dat` into `dir`.
///
/// `plot.dat` is whitespace separated with two columns per curve: abscissa and
/// available distance, then abscissa and required distance (`nan` when unknown).
pub fn export_report(profile: &VisibilityProfile, deficits: &DeficitReport, dir: &Path) -> Result<ReportFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ReportFiles::in_dir(dir);

    let mut w = create(&files.profile_csv)?;
    profile.write_csv(&mut w).map_err(|e| Error::io(&files.profile_csv, e))?;
    finish(&files.profile_csv, w)?;

    let mut w = create(&files.profile_json)?;
    profile.write_json(&mut w)?;
    w.write_all(b"\n").map_err(|e| Error::io(&files.profile_json, e))?;
    finish(&files.profile_json, w)?;

    let mut w = create(&files.deficits_json)?;
    serde_json::to_writer_pretty(&mut w, deficits).map_err(|source| Error::Json {
        context: files.deficits_json.display().to_string(),
        source,
    })?;
    w.write_all(b"\n").map_err(|e| Error::io(&files.deficits_json, e))?;
    finish(&files.deficits_json, w)?;

    let mut w = create(&files.plot_data)?;
    write_plot_data(profile, &mut w).map_err(|e| Error::io(&files.plot_data, e))?;
    finish(&files.plot_data, w)?;

    Ok(files)
}

fn write_plot_data<W: Write>(profile: &VisibilityProfile, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# s available_m s required_m")?;
    for st in &profile.stations {
        let req = st.required_d.map(|r| format!("{r:.3}")).unwrap_or_else(|| "nan".into());
        writeln!(w, "{:.3} {:.3} {:.3} {}", st.s, st.available_d, st.s, req)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sight::{ProfileStation, SweepMode};
    use proptest::prelude::*;

    fn profile(rows: &[(f64, f64, Option<f64>)]) -> VisibilityProfile {
        VisibilityProfile {
            mode: SweepMode::Max,
            cap: 400.0,
            distances: vec![],
            stations: rows
                .iter()
                .map(|&(s, a, r)| {
                    let mut st = ProfileStation::new(s, a, vec![]);
                    st.set_required(r);
                    st
                })
                .collect(),
        }
    }

    #[test]
    fn compliant_profile_has_no_segments() {
        let p = profile(&[(0.0, 200.0, Some(90.0)), (5.0, 90.0, Some(90.0))]);
        assert!(find_deficits(&p).unwrap().segments.is_empty());
    }

    #[test]
    fn one_interval() {
        let rows: Vec<_> = (0..=60)
            .map(|k| {
                let s = 1970.0 + k as f64;
                let a = if (2000.0..=2030.0).contains(&s) { 70.0 + (s - 2010.0).abs() } else { 150.0 };
                (s, a, Some(100.0))
            })
            .collect();
        let r = find_deficits(&profile(&rows)).unwrap();
        assert_eq!(r.segments.len(), 1);
        let seg = r.segments[0];
        assert_eq!((seg.s_start, seg.s_end, seg.worst_s), (2000.0, 2030.0, 2010.0));
        assert_eq!(seg.worst_gap, 30.0);
    }

    #[test]
    fn last_station_only() {
        let p = profile(&[(0.0, 200.0, Some(90.0)), (5.0, 200.0, Some(90.0)), (10.0, 50.0, Some(90.0))]);
        let r = find_deficits(&p).unwrap();
        assert_eq!(r.segments.len(), 1);
        assert_eq!((r.segments[0].s_start, r.segments[0].s_end), (10.0, 10.0));
    }

    #[test]
    fn infeasible_station_splits_and_is_listed() {
        let p = profile(&[(0.0, 50.0, Some(90.0)), (5.0, 50.0, None), (10.0, 50.0, Some(90.0))]);
        let r = find_deficits(&p).unwrap();
        assert_eq!(r.segments.len(), 2);
        assert_eq!(r.infeasible_stations, vec![5.0]);
    }

    #[test]
    fn min_length_filter() {
        let p = profile(&[(0.0, 50.0, Some(90.0)), (5.0, 200.0, Some(90.0)), (10.0, 50.0, Some(90.0)), (15.0, 50.0, Some(90.0))]);
        assert_eq!(find_deficits(&p).unwrap().segments.len(), 2);
        let r = find_deficits_min_length(&p, 5.0).unwrap();
        assert_eq!(r.segments.len(), 1);
        assert_eq!(r.segments[0].s_start, 10.0);
    }

    #[test]
    fn missing_requirement_is_reported() {
        let mut p = profile(&[(0.0, 50.0, Some(90.0))]);
        p.stations[0].required_d = None;
        p.stations[0].infeasible = false;
        assert!(find_deficits(&p).is_err());
    }

    #[test]
    fn export_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = profile(&[(0.0, 112.0, Some(90.968)), (5.0, 80.5, Some(90.968)), (10.0, 400.0, Some(90.968))]);
        let r = find_deficits(&p).unwrap();
        let files = export_report(&p, &r, dir.path()).unwrap();
        let csv = std::fs::read_to_string(&files.profile_csv).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().nth(2).unwrap(), "5.000,80.500,90.968,true");
        let d: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files.deficits_json).unwrap()).unwrap();
        let seg = &d["segments"][0];
        for key in ["s_start", "s_end", "worst_gap", "worst_s"] {
            assert!(seg.get(key).is_some(), "{key}");
        }
        assert_eq!(d["infeasible_stations"], serde_json::json!([]));
        let plot = std::fs::read_to_string(&files.plot_data).unwrap();
        assert_eq!(plot.lines().nth(1).unwrap(), "0.000 112.000 0.000 90.968");
    }

    #[test]
    fn export_to_unwritable_path_names_it() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = export_report(&profile(&[]), &DeficitReport::default(), &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"));
    }

    proptest! {
        #[test]
        fn segments_cover_exactly_the_deficit_stations(
            rows in prop::collection::vec((0.0f64..300.0, 50.0f64..150.0), 0..80),
            shift in -40.0f64..40.0,
        ) {
            let p = profile(&rows.iter().enumerate().map(|(i, &(a, r))| (i as f64, a, Some(r))).collect::<Vec<_>>());
            let r = find_deficits(&p).unwrap();
            let mut covered = vec![false; rows.len()];
            for w in r.segments.windows(2) {
                // disjoint and maximal: a compliant station separates consecutive segments
                prop_assert!(w[1].s_start > w[0].s_end + 1.0 - 1e-9);
            }
            for seg in &r.segments {
                prop_assert!(seg.worst_gap > 0.0);
                for i in seg.s_start as usize..=seg.s_end as usize {
                    covered[i] = true;
                }
            }
            for (i, &(a, req)) in rows.iter().enumerate() {
                prop_assert_eq!(covered[i], a < req);
            }
            let shifted = profile(&rows.iter().enumerate().map(|(i, &(a, r))| (i as f64, a + shift, Some(r + shift))).collect::<Vec<_>>());
            let r2 = find_deficits(&shifted).unwrap();
            prop_assert_eq!(r.segments.len(), r2.segments.len());
            for (x, y) in r.segments.iter().zip(&r2.segments) {
                prop_assert_eq!((x.s_start, x.s_end), (y.s_start, y.s_end));
            }
        }
    }
}
