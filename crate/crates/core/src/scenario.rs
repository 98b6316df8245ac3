//! Scenario files.
//!
//! A scenario is plain text of `key = value` lines grouped in sections.
//! `#` starts a comment. Keys before the first section are global:
//!
//! ```text
//! env = urban                 # preset name, see [environment] for overrides
//! seed = 42
//! horizon_hours = 24          # or horizon_seconds
//! slot_seconds = 600
//! start_seconds = 0
//! include_initial_launch = false
//! objective = excess          # excess | absolute
//!
//! [environment]               # a, b, eta_los, eta_nlos, name
//! [radio]                     # carrier_hz, light_speed, bandwidth_hz, noise_density, rate_bps, bs_coverage_area
//! [energy]                    # p_circuit, battery_j, p_mobility, p_horizontal, p_ascend, p_descend,
//!                             # v_horizontal, v_ascend, v_descend
//! [rsc]                       # x, y, z
//! [area]                      # x, y, width, height
//! [subregion NAME]            # x, y, width, height, pattern | pattern_file | (gamma_r, n_samples,
//!                             # mu_seconds, coefficient = k magnitude phase ...), peak_density,
//!                             # trough_density, density_floor
//! ```
//!
//! Anything left out takes its default: the common radio parameters, 0.5 W
//! circuit power, 1.5 W mobility powers at 1 m/s, one 1000 m x 1000 m
//! subregion with traffic class `E`, the area spanning all subregions, the
//! depot at the ground center of the area, a battery of mean subregion area
//! over pi joules, and a 24 h horizon of 10 min slots.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::channel::{Environment, RadioConfig};
use crate::density::{preset_pattern, DensityMapping, DensityPattern, PatternSource, Subregion, DEFAULT_SAMPLES, DEFAULT_SAMPLE_PERIOD};
use crate::error::{Error, Result};
use crate::layout::{Point3, Rect};
use crate::placement::{EnergyParams, PlacementModel};
use crate::scheduler::{PlanningProblem, SmgdObjective};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub env: Environment,
    pub radio: RadioConfig,
    pub energy: EnergyParams,
    pub subregions: Vec<Subregion>,
    pub rsc: Point3,
    /// Bounding box of the considered area.
    pub area: Rect,
    pub horizon_seconds: f64,
    pub slot_seconds: f64,
    pub start_seconds: f64,
    pub seed: u64,
    pub include_initial_launch: bool,
    pub objective: SmgdObjective,
}

impl Default for Scenario {
    fn default() -> Self {
        // The empty file is always valid.
        Scenario::parse("", Path::new("<default>")).expect("defaults are valid")
    }
}

fn bounding_box(rects: impl Iterator<Item = Rect>) -> Option<Rect> {
    rects.reduce(|a, b| {
        let x0 = a.x.min(b.x);
        let y0 = a.y.min(b.y);
        let x1 = (a.x + a.width).max(b.x + b.width);
        let y1 = (a.y + a.height).max(b.y + b.height);
        Rect::new(x0, y0, x1 - x0, y1 - y0)
    })
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
}

#[derive(Default)]
struct SubregionDraft {
    label: String,
    line: usize,
    x: Option<f64>,
    y: Option<f64>,
    width: Option<f64>,
    height: Option<f64>,
    pattern: Option<String>,
    pattern_file: Option<PathBuf>,
    gamma_r: Option<f64>,
    n_samples: Option<usize>,
    mu_seconds: Option<f64>,
    terms: Vec<(usize, f64, f64)>,
    peak_density: Option<f64>,
    trough_density: Option<f64>,
    floor: Option<f64>,
}

struct Parser<'a> {
    path: &'a Path,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn num(&self, l: &Line) -> Result<f64> {
        let v: f64 = l
            .value
            .parse()
            .map_err(|_| self.err(l.no, format!("{}: '{}' is not a number", l.key, l.value)))?;
        if !v.is_finite() {
            return Err(self.err(l.no, format!("{}: value must be finite", l.key)));
        }
        Ok(v)
    }

    fn uint(&self, l: &Line) -> Result<u64> {
        l.value
            .parse()
            .map_err(|_| self.err(l.no, format!("{}: '{}' is not a non-negative integer", l.key, l.value)))
    }

    fn boolean(&self, l: &Line) -> Result<bool> {
        match l.value {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(self.err(l.no, format!("{}: '{}' is not a boolean", l.key, l.value))),
        }
    }

    fn unknown(&self, l: &Line, section: &str) -> Error {
        self.err(l.no, format!("unknown key '{}' in {section}", l.key))
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses scenario text; relative pattern files resolve against the
    /// directory of `path`.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let p = Parser { path };
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();

        let mut env_name = "urban".to_string();
        let mut env_over: [Option<f64>; 4] = [None; 4];
        let mut radio = RadioConfig::default();
        let mut energy = EnergyParams::default();
        let mut battery_given = false;
        let mut rsc: Option<Point3> = None;
        let mut rsc_parts: [Option<f64>; 3] = [None; 3];
        let mut area_parts: [Option<f64>; 4] = [None; 4];
        let mut horizon = 24.0 * 3600.0;
        let mut slot = 600.0;
        let mut start = 0.0;
        let mut seed = 0u64;
        let mut launch = false;
        let mut objective = SmgdObjective::default();
        let mut drafts: Vec<SubregionDraft> = Vec::new();

        #[derive(Clone, PartialEq)]
        enum Section {
            Global,
            Environment,
            Radio,
            Energy,
            Rsc,
            Area,
            Subregion,
        }
        let mut section = Section::Global;
        let mut seen: HashSet<(String, String)> = HashSet::new();
        let mut section_name = String::new();
        let mut seen_sections: HashSet<String> = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| p.err(no, "section header must end with ']'"))?
                    .trim();
                let (kind, name) = match inner.split_once(char::is_whitespace) {
                    Some((k, n)) => (k, n.trim()),
                    None => (inner, ""),
                };
                section = match (kind, name.is_empty()) {
                    ("environment", true) => Section::Environment,
                    ("radio", true) => Section::Radio,
                    ("energy", true) => Section::Energy,
                    ("rsc", true) => Section::Rsc,
                    ("area", true) => Section::Area,
                    ("subregion", false) => {
                        drafts.push(SubregionDraft {
                            label: name.to_string(),
                            line: no,
                            ..Default::default()
                        });
                        Section::Subregion
                    }
                    ("subregion", true) => return Err(p.err(no, "subregion section needs a name")),
                    _ => return Err(p.err(no, format!("unknown section '[{inner}]'"))),
                };
                section_name = inner.to_string();
                if !seen_sections.insert(section_name.clone()) {
                    return Err(p.err(no, format!("section '[{inner}]' appears twice")));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| p.err(no, format!("expected 'key = value', got '{line}'")))?;
            let l = Line {
                no,
                key: key.trim(),
                value: value.trim(),
            };
            if l.key != "coefficient" && !seen.insert((section_name.clone(), l.key.to_string())) {
                return Err(p.err(no, format!("duplicate key '{}'", l.key)));
            }
            match section {
                Section::Global => match l.key {
                    "env" => env_name = l.value.to_string(),
                    "seed" => seed = p.uint(&l)?,
                    "horizon_hours" => horizon = p.num(&l)? * 3600.0,
                    "horizon_seconds" => horizon = p.num(&l)?,
                    "slot_seconds" => slot = p.num(&l)?,
                    "start_seconds" => start = p.num(&l)?,
                    "include_initial_launch" => launch = p.boolean(&l)?,
                    "objective" => objective = l.value.parse().map_err(|e: Error| p.err(no, e.to_string()))?,
                    _ => return Err(p.unknown(&l, "global section")),
                },
                Section::Environment => match l.key {
                    "name" => env_name = l.value.to_string(),
                    "a" => env_over[0] = Some(p.num(&l)?),
                    "b" => env_over[1] = Some(p.num(&l)?),
                    "eta_los" => env_over[2] = Some(p.num(&l)?),
                    "eta_nlos" => env_over[3] = Some(p.num(&l)?),
                    _ => return Err(p.unknown(&l, "[environment]")),
                },
                Section::Radio => {
                    let v = p.num(&l)?;
                    match l.key {
                        "carrier_hz" => radio.carrier_hz = v,
                        "light_speed" => radio.light_speed = v,
                        "bandwidth_hz" => radio.bandwidth_hz = v,
                        "noise_density" => radio.noise_density = v,
                        "rate_bps" => radio.rate_bps = v,
                        "bs_coverage_area" => radio.bs_coverage_area = v,
                        _ => return Err(p.unknown(&l, "[radio]")),
                    }
                }
                Section::Energy => {
                    let v = p.num(&l)?;
                    match l.key {
                        "p_circuit" => energy.p_circuit = v,
                        "battery_j" => {
                            energy.battery_j = v;
                            battery_given = true;
                        }
                        "p_mobility" => energy = energy.clone().with_mobility_power(v),
                        "p_horizontal" => energy.p_horizontal = v,
                        "p_ascend" => energy.p_ascend = v,
                        "p_descend" => energy.p_descend = v,
                        "v_horizontal" => energy.v_horizontal = v,
                        "v_ascend" => energy.v_ascend = v,
                        "v_descend" => energy.v_descend = v,
                        _ => return Err(p.unknown(&l, "[energy]")),
                    }
                }
                Section::Rsc => {
                    let i = match l.key {
                        "x" => 0,
                        "y" => 1,
                        "z" => 2,
                        _ => return Err(p.unknown(&l, "[rsc]")),
                    };
                    rsc_parts[i] = Some(p.num(&l)?);
                }
                Section::Area => {
                    let i = match l.key {
                        "x" => 0,
                        "y" => 1,
                        "width" => 2,
                        "height" => 3,
                        _ => return Err(p.unknown(&l, "[area]")),
                    };
                    area_parts[i] = Some(p.num(&l)?);
                }
                Section::Subregion => {
                    let d = drafts.last_mut().expect("subregion section has a draft");
                    match l.key {
                        "x" => d.x = Some(p.num(&l)?),
                        "y" => d.y = Some(p.num(&l)?),
                        "width" => d.width = Some(p.num(&l)?),
                        "height" => d.height = Some(p.num(&l)?),
                        "pattern" => d.pattern = Some(l.value.to_string()),
                        "pattern_file" => d.pattern_file = Some(base_dir.join(l.value)),
                        "gamma_r" => d.gamma_r = Some(p.num(&l)?),
                        "n_samples" => d.n_samples = Some(p.uint(&l)? as usize),
                        "mu_seconds" => d.mu_seconds = Some(p.num(&l)?),
                        "peak_density" => d.peak_density = Some(p.num(&l)?),
                        "trough_density" => d.trough_density = Some(p.num(&l)?),
                        "density_floor" => d.floor = Some(p.num(&l)?),
                        "coefficient" => {
                            let f: Vec<&str> = l.value.split_whitespace().collect();
                            if f.len() != 3 {
                                return Err(p.err(no, "coefficient needs 'k magnitude phase'"));
                            }
                            let k = f[0]
                                .parse()
                                .map_err(|_| p.err(no, format!("coefficient index '{}' is not an integer", f[0])))?;
                            let num = |s: &str| {
                                s.parse::<f64>()
                                    .map_err(|_| p.err(no, format!("'{s}' is not a number")))
                            };
                            d.terms.push((k, num(f[1])?, num(f[2])?));
                        }
                        _ => return Err(p.unknown(&l, "[subregion]")),
                    }
                }
            }
        }

        let mut env = Environment::preset(&env_name).map_err(|e| p.err(0, e.to_string()))?;
        for (slot_ref, v) in [&mut env.a, &mut env.b, &mut env.eta_los, &mut env.eta_nlos]
            .into_iter()
            .zip(env_over)
        {
            if let Some(v) = v {
                *slot_ref = v;
            }
        }

        if drafts.is_empty() {
            drafts.push(SubregionDraft {
                label: "E".into(),
                width: Some(1000.0),
                height: Some(1000.0),
                pattern: Some("E".into()),
                ..Default::default()
            });
        }
        let mut subregions = Vec::with_capacity(drafts.len());
        for d in drafts {
            subregions.push(Self::finish_subregion(&p, d)?);
        }

        let area = match area_parts {
            [None, None, None, None] => bounding_box(subregions.iter().map(|s| s.rect)).expect("at least one subregion"),
            [Some(x), Some(y), Some(w), Some(h)] => Rect::new(x, y, w, h),
            _ => return Err(p.err(0, "[area] needs all of x, y, width, height")),
        };
        if rsc_parts.iter().any(Option::is_some) {
            let (cx, cy) = area.center();
            rsc = Some(Point3::new(
                rsc_parts[0].unwrap_or(cx),
                rsc_parts[1].unwrap_or(cy),
                rsc_parts[2].unwrap_or(0.0),
            ));
        }
        let rsc = rsc.unwrap_or_else(|| {
            let (cx, cy) = area.center();
            Point3::new(cx, cy, 0.0)
        });
        if !battery_given {
            let mean = subregions.iter().map(Subregion::area).sum::<f64>() / subregions.len() as f64;
            energy.battery_j = mean / std::f64::consts::PI;
        }

        let s = Scenario {
            env,
            radio,
            energy,
            subregions,
            rsc,
            area,
            horizon_seconds: horizon,
            slot_seconds: slot,
            start_seconds: start,
            seed,
            include_initial_launch: launch,
            objective,
        };
        s.validate()?;
        Ok(s)
    }

    fn finish_subregion(p: &Parser, d: SubregionDraft) -> Result<Subregion> {
        let need = |v: Option<f64>, what: &str| v.ok_or_else(|| p.err(d.line, format!("subregion '{}' needs {what}", d.label)));
        let rect = Rect::new(d.x.unwrap_or(0.0), d.y.unwrap_or(0.0), need(d.width, "width")?, need(d.height, "height")?);
        let inline = d.gamma_r.is_some() || !d.terms.is_empty() || d.n_samples.is_some() || d.mu_seconds.is_some();
        let sources = usize::from(d.pattern.is_some()) + usize::from(d.pattern_file.is_some()) + usize::from(inline);
        if sources > 1 {
            return Err(p.err(
                d.line,
                format!("subregion '{}' must use only one of pattern, pattern_file, inline coefficients", d.label),
            ));
        }
        let (pattern, source) = if let Some(file) = d.pattern_file {
            (DensityPattern::load(&file)?, PatternSource::File(file))
        } else if inline {
            let gamma = d
                .gamma_r
                .ok_or_else(|| p.err(d.line, format!("subregion '{}': inline pattern needs gamma_r", d.label)))?;
            let pat = DensityPattern::from_polar(
                gamma,
                d.n_samples.unwrap_or(DEFAULT_SAMPLES),
                d.mu_seconds.unwrap_or(DEFAULT_SAMPLE_PERIOD),
                &d.terms,
            )
            .map_err(|e| p.err(d.line, format!("subregion '{}': {e}", d.label)))?;
            (pat, PatternSource::Inline(d.terms))
        } else {
            let name = d.pattern.unwrap_or_else(|| "E".into());
            (
                preset_pattern(&name).map_err(|e| p.err(d.line, e.to_string()))?,
                PatternSource::Preset(name),
            )
        };
        let defaults = DensityMapping::default();
        Ok(Subregion {
            label: d.label,
            rect,
            pattern,
            mapping: DensityMapping {
                peak_density: d.peak_density,
                trough_density: d.trough_density,
                floor: d.floor.unwrap_or(defaults.floor),
            },
            pattern_source: source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.radio.validate()?;
        self.energy.validate()?;
        self.area.validate()?;
        if self.subregions.is_empty() {
            return Err(Error::invalid("scenario", "at least one subregion is required"));
        }
        let mut labels = HashSet::new();
        for (i, s) in self.subregions.iter().enumerate() {
            s.validate()?;
            if !labels.insert(s.label.as_str()) {
                return Err(Error::invalid("scenario", format!("subregion label '{}' used twice", s.label)));
            }
            if !self.area.contains_rect(&s.rect) {
                return Err(Error::invalid("scenario", format!("subregion '{}' extends outside the area", s.label)));
            }
            for t in &self.subregions[i + 1..] {
                if s.rect.overlaps(&t.rect) {
                    return Err(Error::invalid(
                        "scenario",
                        format!("subregions '{}' and '{}' overlap", s.label, t.label),
                    ));
                }
            }
        }
        if !(self.slot_seconds > 0.0 && self.slot_seconds.is_finite()) {
            return Err(Error::invalid("scenario", "slot_seconds must be positive"));
        }
        if !(self.horizon_seconds > 0.0 && self.horizon_seconds.is_finite()) {
            return Err(Error::invalid("scenario", "horizon must be positive"));
        }
        let ratio = self.horizon_seconds / self.slot_seconds;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::invalid(
                "scenario",
                format!("horizon {} s is not a multiple of the slot {} s", self.horizon_seconds, self.slot_seconds),
            ));
        }
        if !(self.start_seconds >= 0.0 && self.start_seconds.is_finite()) {
            return Err(Error::invalid("scenario", "start_seconds must be >= 0"));
        }
        if ![self.rsc.x, self.rsc.y, self.rsc.z].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("scenario", "depot position must be finite"));
        }
        Ok(())
    }

    pub fn n_slots(&self) -> usize {
        (self.horizon_seconds / self.slot_seconds).round() as usize
    }

    pub fn model(&self) -> Result<Arc<PlacementModel>> {
        PlacementModel::cached(&self.env, &self.radio)
    }

    /// Planning problem over the scenario horizon from `start_seconds`.
    pub fn planning_problem(&self) -> Result<PlanningProblem> {
        self.planning_problem_with(&self.energy, self.start_seconds, self.n_slots())
    }

    pub fn planning_problem_with(&self, energy: &EnergyParams, start: f64, slots: usize) -> Result<PlanningProblem> {
        let mut p = PlanningProblem::from_subregions(
            &self.subregions,
            &self.radio,
            self.model()?,
            energy.clone(),
            self.rsc,
            start,
            self.slot_seconds,
            slots,
        )?;
        p.include_initial_launch = self.include_initial_launch;
        Ok(p)
    }

    /// Serializes every field explicitly; parsing the output gives back an
    /// identical scenario.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let e = &self.env;
        let r = &self.radio;
        let g = &self.energy;
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "horizon_seconds = {:?}", self.horizon_seconds);
        let _ = writeln!(s, "slot_seconds = {:?}", self.slot_seconds);
        let _ = writeln!(s, "start_seconds = {:?}", self.start_seconds);
        let _ = writeln!(s, "include_initial_launch = {}", self.include_initial_launch);
        let objective = match self.objective {
            SmgdObjective::Excess => "excess",
            SmgdObjective::Absolute => "absolute",
        };
        let _ = writeln!(s, "objective = {objective}");
        let _ = writeln!(s, "\n[environment]\nname = {}\na = {:?}\nb = {:?}\neta_los = {:?}\neta_nlos = {:?}", e.name, e.a, e.b, e.eta_los, e.eta_nlos);
        let _ = writeln!(
            s,
            "\n[radio]\ncarrier_hz = {:?}\nlight_speed = {:?}\nbandwidth_hz = {:?}\nnoise_density = {:?}\nrate_bps = {:?}\nbs_coverage_area = {:?}",
            r.carrier_hz, r.light_speed, r.bandwidth_hz, r.noise_density, r.rate_bps, r.bs_coverage_area
        );
        let _ = writeln!(
            s,
            "\n[energy]\np_circuit = {:?}\nbattery_j = {:?}\np_horizontal = {:?}\np_ascend = {:?}\np_descend = {:?}\nv_horizontal = {:?}\nv_ascend = {:?}\nv_descend = {:?}",
            g.p_circuit, g.battery_j, g.p_horizontal, g.p_ascend, g.p_descend, g.v_horizontal, g.v_ascend, g.v_descend
        );
        let _ = writeln!(s, "\n[rsc]\nx = {:?}\ny = {:?}\nz = {:?}", self.rsc.x, self.rsc.y, self.rsc.z);
        let a = &self.area;
        let _ = writeln!(s, "\n[area]\nx = {:?}\ny = {:?}\nwidth = {:?}\nheight = {:?}", a.x, a.y, a.width, a.height);
        for sub in &self.subregions {
            let rc = &sub.rect;
            let _ = writeln!(
                s,
                "\n[subregion {}]\nx = {:?}\ny = {:?}\nwidth = {:?}\nheight = {:?}",
                sub.label, rc.x, rc.y, rc.width, rc.height
            );
            match &sub.pattern_source {
                PatternSource::Preset(name) => {
                    let _ = writeln!(s, "pattern = {name}");
                }
                PatternSource::File(path) => {
                    let _ = writeln!(s, "pattern_file = {}", path.display());
                }
                PatternSource::Inline(terms) => {
                    let pat = &sub.pattern;
                    let _ = writeln!(
                        s,
                        "gamma_r = {:?}\nn_samples = {}\nmu_seconds = {:?}",
                        pat.scale, pat.n_samples, pat.sample_period
                    );
                    if terms.is_empty() {
                        for (k, x) in &pat.coefficients {
                            let _ = writeln!(s, "coefficient = {k} {:?} {:?}", x.norm(), x.arg());
                        }
                    } else {
                        for (k, m, ph) in terms {
                            let _ = writeln!(s, "coefficient = {k} {m:?} {ph:?}");
                        }
                    }
                }
            }
            if let Some(peak) = sub.mapping.peak_density {
                let _ = writeln!(s, "peak_density = {peak:?}");
            }
            if let Some(trough) = sub.mapping.trough_density {
                let _ = writeln!(s, "trough_density = {trough:?}");
            }
            let _ = writeln!(s, "density_floor = {:?}", sub.mapping.floor);
        }
        s
    }
}
