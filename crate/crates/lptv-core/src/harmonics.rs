use std::ops::{Index, IndexMut};

/// Values at the three output harmonics k = −1, 0, +1, indexed by `k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Harmonics<T>(pub [T; 3]);

pub const KS: [i32; 3] = [-1, 0, 1];

impl<T> Harmonics<T> {
    pub fn from_fn(mut f: impl FnMut(i32) -> T) -> Self {
        Harmonics([f(-1), f(0), f(1)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &T)> {
        KS.iter().copied().zip(self.0.iter())
    }
}

fn slot(k: i32) -> usize {
    match k {
        -1 => 0,
        0 => 1,
        1 => 2,
        _ => panic!("harmonic index {k} outside {{-1, 0, 1}}"),
    }
}

impl<T> Index<i32> for Harmonics<T> {
    type Output = T;
    fn index(&self, k: i32) -> &T {
        &self.0[slot(k)]
    }
}

impl<T> IndexMut<i32> for Harmonics<T> {
    fn index_mut(&mut self, k: i32) -> &mut T {
        &mut self.0[slot(k)]
    }
}
