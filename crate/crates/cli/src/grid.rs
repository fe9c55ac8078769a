//! Sweep grids over the chart coordinates. Each z_i contributes two real
//! axes, x_i and y_i; a grid names the swept axes and pins everything else
//! at zero. Rows enumerate with the first listed axis slowest.

use clap::ValueEnum;
use quditphase::geometry::PhasePoint;
use quditphase::scalar::C64;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Debug)]
pub struct Axis {
    pub name: String,
    pub slot: usize,
    pub part: Part,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, index: usize) -> f64 {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        self.lo + step * index as f64
    }
}

/// Preset planes for section plots: position pins every y_i at zero,
/// momentum pins every x_i.
#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Section {
    Position,
    Momentum,
    Full,
}

impl Section {
    fn pins(&self, part: Part) -> bool {
        matches!(
            (self, part),
            (Section::Position, Part::Im) | (Section::Momentum, Part::Re)
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Section::Position => "position",
            Section::Momentum => "momentum",
            Section::Full => "full",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub chart_dim: usize,
    pub section: Section,
    pub axes: Vec<Axis>,
}

pub const MAX_POINTS: usize = 1 << 22;

fn parse_axis_name(name: &str, chart_dim: usize) -> Result<(usize, Part), String> {
    let part = match name.as_bytes().first() {
        Some(b'x') => Part::Re,
        Some(b'y') => Part::Im,
        _ => return Err(format!("axis '{name}' must start with x or y")),
    };
    let k: usize = name[1..]
        .parse()
        .map_err(|_| format!("axis '{name}' needs a coordinate index"))?;
    if k == 0 || k > chart_dim {
        return Err(format!(
            "axis '{name}' is outside the chart (coordinates 1..={chart_dim})"
        ));
    }
    Ok((k - 1, part))
}

impl GridSpec {
    pub fn parse(spec: &str, chart_dim: usize, section: Section) -> Result<Self, String> {
        let mut axes: Vec<Axis> = Vec::new();
        for piece in spec.split(',') {
            let fields: Vec<&str> = piece.split(':').collect();
            if fields.len() != 4 {
                return Err(format!("axis '{piece}' must be name:lo:hi:count"));
            }
            let (slot, part) = parse_axis_name(fields[0], chart_dim)?;
            if section.pins(part) {
                return Err(format!(
                    "axis '{}' is pinned to 0 by section '{}'",
                    fields[0],
                    section.label()
                ));
            }
            if axes.iter().any(|a| a.slot == slot && a.part == part) {
                return Err(format!("axis '{}' appears twice", fields[0]));
            }
            let lo: f64 = fields[1]
                .parse()
                .map_err(|_| format!("axis '{piece}': bad lower bound"))?;
            let hi: f64 = fields[2]
                .parse()
                .map_err(|_| format!("axis '{piece}': bad upper bound"))?;
            let count: usize = fields[3]
                .parse()
                .map_err(|_| format!("axis '{piece}': bad sample count"))?;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(format!("axis '{piece}': range must be finite with lo < hi"));
            }
            if count < 2 {
                return Err(format!("axis '{piece}': need at least 2 samples"));
            }
            axes.push(Axis {
                name: fields[0].to_string(),
                slot,
                part,
                lo,
                hi,
                count,
            });
        }
        if axes.is_empty() {
            return Err("grid needs at least one axis".into());
        }
        let spec = GridSpec { chart_dim, section, axes };
        if spec.points() > MAX_POINTS {
            return Err(format!("grid exceeds {MAX_POINTS} points"));
        }
        Ok(spec)
    }

    pub fn points(&self) -> usize {
        self.axes.iter().fold(1usize, |acc, a| {
            acc.saturating_mul(a.count)
        })
    }

    /// Full canonical coordinate names, x1,y1,...; pinned and unswept
    /// coordinates appear as constant columns.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(2 * self.chart_dim + 1);
        for k in 1..=self.chart_dim {
            names.push(format!("x{k}"));
            names.push(format!("y{k}"));
        }
        names.push("F".into());
        names
    }

    /// Coordinates and chart point for one linear row index.
    pub fn point(&self, linear: usize) -> (Vec<f64>, PhasePoint) {
        let mut rem = linear;
        let mut idx = vec![0usize; self.axes.len()];
        for (j, ax) in self.axes.iter().enumerate().rev() {
            idx[j] = rem % ax.count;
            rem /= ax.count;
        }
        let mut coords = vec![0.0f64; 2 * self.chart_dim];
        for (ax, &i) in self.axes.iter().zip(&idx) {
            let off = matches!(ax.part, Part::Im) as usize;
            coords[2 * ax.slot + off] = ax.value(i);
        }
        let z = PhasePoint(
            (0..self.chart_dim)
                .map(|k| C64::new(coords[2 * k], coords[2 * k + 1]))
                .collect(),
        );
        (coords, z)
    }
}
