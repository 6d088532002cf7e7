//! Plain PGM (P2) rendering of a key-rate map.

/// Grayscale image; row 0 is the top line of the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shading {
    /// 255 where K > 0, 0 elsewhere.
    Sign,
    /// `255 * clamp(K, 0, max) / max`, rounded.
    Linear { max: f64 },
}

impl Shading {
    pub fn gray(self, k: f64) -> u8 {
        match self {
            Shading::Sign => {
                if k > 0.0 {
                    255
                } else {
                    0
                }
            }
            Shading::Linear { max } => {
                if !(k > 0.0) {
                    0
                } else {
                    (255.0 * (k / max).min(1.0)).round() as u8
                }
            }
        }
    }
}

impl RegionImage {
    /// `rates` in row-major order (omega outer, tau inner). Low omega ends
    /// up on the bottom row so tau runs left to right and omega upward.
    pub fn from_rates(rates: &[f64], width: usize, height: usize, shading: Shading) -> Self {
        assert_eq!(rates.len(), width * height);
        let mut values = Vec::with_capacity(rates.len());
        for row in (0..height).rev() {
            values.extend(rates[row * width..(row + 1) * width].iter().map(|&k| shading.gray(k)));
        }
        Self { width, height, values }
    }

    /// Each image row starts a new line; long rows wrap at 70 characters.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.values.chunks(self.width.max(1)) {
            let mut line = String::new();
            for v in row {
                let s = v.to_string();
                if !line.is_empty() && line.len() + 1 + s.len() > 70 {
                    out.push_str(&line);
                    out.push('\n');
                    line.clear();
                }
                if !line.is_empty() {
                    line.push(' ');
                }
                line.push_str(&s);
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}
