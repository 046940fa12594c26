use alloc::vec::Vec;
use core::fmt;

/// How a table of coefficients was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Quadrature,
    Closed,
    ClosedAlt,
    RecurrenceI,
    RecurrenceJ,
    WaveStep,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Quadrature,
        Method::Closed,
        Method::ClosedAlt,
        Method::RecurrenceI,
        Method::RecurrenceJ,
        Method::WaveStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Closed => "closed",
            Method::ClosedAlt => "closed_alt",
            Method::RecurrenceI => "recurrence_i",
            Method::RecurrenceJ => "recurrence_j",
            Method::WaveStep => "wave_step",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        let s = s.replace('-', "_");
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-entry reliability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum EntryFlag {
    #[default]
    Ok,
    /// Cancellation exceeded the reliability threshold.
    Unreliable,
    /// Outside the domain of dependence of a simulation.
    Undefined,
}

impl EntryFlag {
    pub fn name(self) -> &'static str {
        match self {
            EntryFlag::Ok => "ok",
            EntryFlag::Unreliable => "unreliable",
            EntryFlag::Undefined => "undefined",
        }
    }
}

/// Which coefficients a grid holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridFamily {
    /// `f^{(λ)}_{i,j}`.
    Same { lambda: f64 },
    /// `f^{(λ,μ)}_{i,j}`.
    Mixed { lambda: f64, mu: f64 },
    /// `u_{i,j}` of a general setup.
    General,
}

impl GridFamily {
    pub fn lambda(&self) -> Option<f64> {
        match *self {
            GridFamily::Same { lambda } | GridFamily::Mixed { lambda, .. } => Some(lambda),
            GridFamily::General => None,
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match *self {
            GridFamily::Mixed { mu, .. } => Some(mu),
            _ => None,
        }
    }
}

/// Dense row-major table indexed by `(i, j)`, `0 ≤ i ≤ imax`, `0 ≤ j ≤ jmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    pub family: GridFamily,
    pub imax: usize,
    pub jmax: usize,
    pub method: Method,
    values: Vec<f64>,
    flags: Vec<EntryFlag>,
}

impl CoefficientGrid {
    pub fn zeros(family: GridFamily, imax: usize, jmax: usize, method: Method) -> Self {
        let n = (imax + 1) * (jmax + 1);
        CoefficientGrid {
            family,
            imax,
            jmax,
            method,
            values: alloc::vec![0.0; n],
            flags: alloc::vec![EntryFlag::Ok; n],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        assert!(i <= self.imax && j <= self.jmax, "({i}, {j}) outside grid");
        i * (self.jmax + 1) + j
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i <= self.imax && j <= self.jmax
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    /// Entry value, or 0 outside the grid or the defined region.
    pub fn get_or_zero(&self, i: isize, j: isize) -> f64 {
        if i < 0 || j < 0 {
            return 0.0;
        }
        let (i, j) = (i as usize, j as usize);
        if !self.contains(i, j) || self.flag(i, j) == EntryFlag::Undefined {
            0.0
        } else {
            self.get(i, j)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.idx(i, j);
        self.values[k] = value;
    }

    pub fn flag(&self, i: usize, j: usize) -> EntryFlag {
        self.flags[self.idx(i, j)]
    }

    pub fn set_flag(&mut self, i: usize, j: usize, flag: EntryFlag) {
        let k = self.idx(i, j);
        self.flags[k] = flag;
    }

    /// Column `f_{·,j}`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..=self.imax).map(|i| self.get(i, j)).collect()
    }

    /// Row `f_{i,·}`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..=self.jmax).map(|j| self.get(i, j)).collect()
    }

    /// Worst flag among defined entries.
    pub fn worst_flag(&self) -> EntryFlag {
        self.flags.iter().copied().filter(|&f| f != EntryFlag::Undefined).max().unwrap_or_default()
    }

    pub fn unreliable_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f == EntryFlag::Unreliable).count()
    }

    /// Multiply every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut g = self.clone();
        for v in g.values.iter_mut() {
            *v *= c;
        }
        g
    }

    /// `(i, j, value, flag)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64, EntryFlag)> + '_ {
        (0..=self.imax).flat_map(move |i| {
            (0..=self.jmax).map(move |j| (i, j, self.get(i, j), self.flag(i, j)))
        })
    }
}
