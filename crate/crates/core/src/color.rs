//! Cubehelix palettes and the trace-wide legend.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::model::Task;

pub const DEFAULT_MAX_COLORS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    /// Rec.601 luma.
    pub fn luma(self) -> f64 {
        0.299 * self.0 as f64 + 0.587 * self.1 as f64 + 0.114 * self.2 as f64
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubehelix {
    pub start: f64,
    pub rotations: f64,
    pub hue: f64,
    pub gamma: f64,
}

impl Default for Cubehelix {
    fn default() -> Self {
        Cubehelix { start: 0.5, rotations: -1.5, hue: 1.0, gamma: 1.0 }
    }
}

impl Cubehelix {
    /// Unclamped channels at `lambda` in `[0, 1]`.
    pub fn raw(&self, lambda: f64) -> [f64; 3] {
        let g = lambda.powf(self.gamma);
        let phi = 2.0 * PI * (self.start / 3.0 + self.rotations * lambda);
        let a = self.hue * g * (1.0 - g) / 2.0;
        let (sin, cos) = phi.sin_cos();
        [
            g + a * (-0.14861 * cos + 1.78277 * sin),
            g + a * (-0.29227 * cos - 0.90649 * sin),
            g + a * (1.97294 * cos),
        ]
    }

    pub fn at(&self, lambda: f64) -> Rgb {
        let q = |c: f64| (c.clamp(0.0, 1.0) * 255.0).round() as u8;
        let [r, g, b] = self.raw(lambda);
        Rgb(q(r), q(g), q(b))
    }

    /// `n` colors at `lambda_i = (i + 1) / (n + 1)`, skipping pure black and
    /// white.
    pub fn palette(&self, n: usize) -> Vec<Rgb> {
        (0..n).map(|i| self.at((i + 1) as f64 / (n + 1) as f64)).collect()
    }
}

pub fn cubehelix_palette(n: usize) -> Vec<Rgb> {
    Cubehelix::default().palette(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ColorMode {
    CategoryAction,
    CategoryOnly,
}

/// Legend: distinct keys in lexicographic order, each with its own color.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorKeyMap {
    pub mode: ColorMode,
    pub keys: Vec<String>,
    pub palette: Vec<Rgb>,
}

impl ColorKeyMap {
    pub fn key_for(&self, task: &Task) -> String {
        match self.mode {
            ColorMode::CategoryAction => task.category_action(),
            ColorMode::CategoryOnly => task.category.clone(),
        }
    }

    pub fn color_of(&self, key: &str) -> Option<Rgb> {
        self.keys.binary_search_by(|k| k.as_str().cmp(key)).ok().map(|i| self.palette[i])
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Colors `Category-Action` pairs, falling back to categories alone when
/// there are more than `max_colors` pairs.
pub fn build_color_key<'a, I>(tasks: I, max_colors: usize) -> ColorKeyMap
where
    I: IntoIterator<Item = &'a Task>,
{
    let mut pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for t in tasks {
        pairs.insert((t.category.as_str(), t.action.as_str()));
    }
    let (mode, keys): (ColorMode, Vec<String>) = if pairs.len() > max_colors.max(1) {
        let cats: BTreeSet<&str> = pairs.iter().map(|(c, _)| *c).collect();
        (ColorMode::CategoryOnly, cats.into_iter().map(str::to_owned).collect())
    } else {
        let mut keys: Vec<String> = pairs.iter().map(|(c, a)| format!("{c}-{a}")).collect();
        keys.sort();
        keys.dedup();
        (ColorMode::CategoryAction, keys)
    };
    let palette = cubehelix_palette(keys.len());
    ColorKeyMap { mode, keys, palette }
}
