use num_complex::Complex64 as C64;

use crate::{Direction, Harmonics, HarmonicSRow};

/// Three-port S-matrix at one output harmonic; `s[i][j]` is S_{(i+1)(j+1)},
/// output port i+1 for a tone at input port j+1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicSMatrix {
    pub k: i32,
    pub input_freq: f64,
    pub output_freq: f64,
    pub s: [[C64; 3]; 3],
}

impl HarmonicSMatrix {
    /// Column for a tone at `port` (1-based), listed as (reflection, next port,
    /// next-but-one port) so that it lines up with a port-1 row.
    pub fn row_for_input(&self, port: usize) -> [C64; 3] {
        let j = port - 1;
        [self.s[j][j], self.s[(j + 1) % 3][j], self.s[(j + 2) % 3][j]]
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for i in 0..3 {
            for j in 0..3 {
                t.s[i][j] = self.s[j][i];
            }
        }
        t
    }

    /// Relabels every port p → p+1 (mod 3); applying it three times is the identity.
    pub fn rotate(&self) -> Self {
        let mut r = *self;
        for i in 0..3 {
            for j in 0..3 {
                r.s[(i + 1) % 3][(j + 1) % 3] = self.s[i][j];
            }
        }
        r
    }
}

/// Completes the port-1 rows into full matrices using the threefold symmetry.
///
/// Exciting port p instead of port 1 is the same circuit with the modulation
/// advanced by (p−1)·α, so sideband entries of column p pick up
/// e^{−jk(p−1)α}; at k = 0 the matrix is the plain circulant.
pub fn full_s_matrix(rows: &Harmonics<HarmonicSRow>, direction: Direction) -> Harmonics<HarmonicSMatrix> {
    Harmonics::from_fn(|k| {
        let r = rows[k];
        let (a, b, c) = (r.s11, r.s21, r.s31);
        let mut s = [[a, c, b], [b, a, c], [c, b, a]];
        for p in 0..3usize {
            let rot = C64::from_polar(1.0, -(k as f64) * p as f64 * direction.alpha());
            for row in s.iter_mut() {
                row[p] *= rot;
            }
        }
        HarmonicSMatrix {
            k,
            input_freq: r.input_freq,
            output_freq: r.output_freq,
            s,
        }
    })
}
