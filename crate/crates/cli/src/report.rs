//! CSV and JSON rendering. Floats in CSV use `{:.16e}` (17 significant
//! digits, locale-free); JSON uses serde_json's shortest round-trip form.

use std::fmt::Write;

use maglat_core::sweep::SweepRecord;
use maglat_core::trap::{Band, BandGap, InBandBarrier, TrapSite};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::FieldMap;
use crate::run::LevelRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Provenance stamped on every output.
pub struct Header {
    pub version: &'static str,
    pub config_hash: String,
    pub config_json: String,
}

impl Header {
    fn csv(&self, out: &mut String) {
        writeln!(out, "# maglat {}", self.version).unwrap();
        writeln!(out, "# config_sha256 {}", self.config_hash).unwrap();
        writeln!(out, "# config {}", self.config_json).unwrap();
    }

    fn json(&self, body: Value) -> String {
        let config: Value = serde_json::from_str(&self.config_json).expect("config is JSON");
        let mut doc = json!({
            "tool": "maglat",
            "version": self.version,
            "config_sha256": self.config_hash,
            "config": config,
        });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, f)
}

fn csv(header: &Header, columns: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::new();
    header.csv(&mut out);
    out.push_str(columns);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

pub fn field_map(
    header: &Header,
    format: Format,
    map: &FieldMap,
    values: &[f64],
    clamped: &[bool],
) -> String {
    let region: maglat_core::trap::SearchRegion = map.region.into();
    let grid: maglat_core::trap::GridDims = map.grid.into();
    match format {
        Format::Csv => {
            let rows = (0..values.len()).map(|i| {
                let p = grid.point(&region, i);
                vec![f(p.x), f(p.y), f(p.z), f(values[i]), u8::from(clamped[i]).to_string()]
            });
            let mut out = csv(header, "x_m,y_m,z_m,b_T,clamped", rows);
            let dims = format!("# grid {}x{}x{} ordering x-fastest\n", grid.nx, grid.ny, grid.nz);
            let at = out.find("x_m,").expect("column line present");
            out.insert_str(at, &dims);
            out
        }
        Format::Json => header.json(json!({
            "region": to_value(map.region),
            "grid": to_value(map.grid),
            "ordering": "x-fastest",
            "b_T": values,
            "clamped": clamped.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i).collect::<Vec<_>>(),
        })),
    }
}

pub fn sites(header: &Header, format: Format, sites: &[TrapSite]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "x_m,y_m,z_m,b_min_T,lam1,lam2,lam3,band",
            sites.iter().map(|s| {
                let l = s.hessian_eigenvalues;
                vec![
                    f(s.position.x),
                    f(s.position.y),
                    f(s.position.z),
                    f(s.b_min),
                    f(l[0]),
                    f(l[1]),
                    f(l[2]),
                    s.band_index.to_string(),
                ]
            }),
        ),
        Format::Json => header.json(json!({ "sites": to_value(sites) })),
    }
}

pub fn bands(header: &Header, format: Format, bands: &[Band]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "band,site_count,z_centroid_m,b_floor_T",
            bands.iter().map(|b| {
                vec![
                    b.index.to_string(),
                    b.sites.len().to_string(),
                    f(b.z_centroid),
                    f(b.b_floor),
                ]
            }),
        ),
        Format::Json => header.json(json!({
            "bands": bands.iter().map(|b| json!({
                "band": b.index,
                "site_indices": b.site_indices,
                "z_centroid_m": b.z_centroid,
                "b_floor_T": b.b_floor,
            })).collect::<Vec<_>>(),
        })),
    }
}

pub fn band_gaps(header: &Header, format: Format, gaps: &[BandGap]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "lower_band,upper_band,gap_T,vertical_barrier_T,site_a,site_b,saddle_x_m,saddle_y_m,saddle_z_m",
            gaps.iter().map(|g| {
                let s = g.saddle.saddle_position;
                vec![
                    g.lower_band.to_string(),
                    g.upper_band.to_string(),
                    f(g.gap),
                    f(g.vertical_barrier),
                    g.vertical_pair.0.to_string(),
                    g.vertical_pair.1.to_string(),
                    f(s.x),
                    f(s.y),
                    f(s.z),
                ]
            }),
        ),
        Format::Json => header.json(json!({ "band_gaps": to_value(gaps) })),
    }
}

pub fn barriers(header: &Header, format: Format, barriers: &[InBandBarrier]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "band,site_a,site_b,delta_b_T,saddle_x_m,saddle_y_m,saddle_z_m,saddle_b_T",
            barriers.iter().map(|b| {
                let s = b.result.saddle_position;
                vec![
                    b.band.to_string(),
                    b.site_a.to_string(),
                    b.site_b.to_string(),
                    f(b.result.delta_b),
                    f(s.x),
                    f(s.y),
                    f(s.z),
                    f(b.result.saddle_b),
                ]
            }),
        ),
        Format::Json => header.json(json!({ "barriers": to_value(barriers) })),
    }
}

pub fn levels(header: &Header, format: Format, species: &str, rows: &[LevelRow]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "site,omega1_rad_s,omega2_rad_s,omega3_rad_s,depth_J,depth_uK,depth_kHz,\
             levels1,levels2,levels3,limiting_site,ground_transmission",
            rows.iter().map(|r| {
                let t = &r.trap;
                vec![
                    t.site.to_string(),
                    f(t.omegas[0]),
                    f(t.omegas[1]),
                    f(t.omegas[2]),
                    f(t.depth),
                    f(t.depth_microkelvin),
                    f(t.depth_kilohertz),
                    t.bound_levels[0].to_string(),
                    t.bound_levels[1].to_string(),
                    t.bound_levels[2].to_string(),
                    t.limiting_neighbour
                        .map_or_else(String::new, |j| j.to_string()),
                    opt(r.ground_transmission),
                ]
            }),
        ),
        Format::Json => header.json(json!({
            "species": species,
            "levels": rows.iter().map(|r| {
                let mut v = to_value(r.trap);
                v["ground_transmission"] = to_value(r.ground_transmission);
                v
            }).collect::<Vec<_>>(),
        })),
    }
}

pub fn sweep(header: &Header, format: Format, records: &[SweepRecord]) -> String {
    match format {
        Format::Csv => csv(
            header,
            "bias_T,bx_T,by_T,bz_T,m_eff_A_m,site_count,band_count,zero_field_count,\
             mean_delta_b_T,min_delta_b_T,min_b_min_T,band_gaps_T",
            records.iter().map(|r| {
                let gaps: Vec<String> = r.band_gaps.iter().map(|&g| f(g)).collect();
                vec![
                    f(r.bias_value),
                    f(r.bias.bx),
                    f(r.bias.by),
                    f(r.bias.bz),
                    f(r.m_eff),
                    r.site_count.to_string(),
                    r.band_count.to_string(),
                    r.zero_field_count.to_string(),
                    opt(r.mean_delta_b),
                    opt(r.min_delta_b),
                    opt(r.min_b_min),
                    gaps.join(";"),
                ]
            }),
        ),
        Format::Json => header.json(json!({ "records": to_value(records) })),
    }
}
