//! Data behind the three wave pictures: the Legendre wave moving right,
//! one row across several `λ`, and the localized Geronimus wave.

use ultracc_core::coeffs::{f_mixed_table_extended, f_table_extended, CoefficientGrid};
use ultracc_core::orthopoly::UltraParam;
use ultracc_core::spectral::{row_energy, simulate_ultraspherical, wave_simulate, WaveOperator, WaveSystem};
use ultracc_core::specfun::Expansion;
use ultracc_core::Error;

use crate::format::{write_records, Format, SimRecord};

/// Initial row length and number of simulated rows used by every figure.
pub const ROW_LEN: usize = 61;
pub const ROWS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    MovingWave,
    LambdaSweep,
    Geronimus,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::MovingWave, Figure::LambdaSweep, Figure::Geronimus];

    pub fn number(self) -> u8 {
        match self {
            Figure::MovingWave => 1,
            Figure::LambdaSweep => 2,
            Figure::Geronimus => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Figure> {
        Figure::ALL.into_iter().find(|f| f.number() == n)
    }
}

/// `f_{0..n, 0}` in extended precision, the exact first row.
pub fn first_row(lambda: UltraParam, n: usize) -> Result<Vec<Expansion>, Error> {
    Ok(f_table_extended(lambda, n - 1, 0)?.into_iter().map(|r| r[0]).collect())
}

pub fn ultraspherical_simulation(lambda: UltraParam, n: usize, rows: usize) -> Result<CoefficientGrid, Error> {
    simulate_ultraspherical(lambda, &first_row(lambda, n)?, rows)
}

pub fn mixed_simulation(lambda: UltraParam, mu: UltraParam, n: usize, rows: usize) -> Result<CoefficientGrid, Error> {
    let row = f_mixed_table_extended(lambda, mu, n - 1, 0)?.into_iter().map(|r| r[0]).collect();
    wave_simulate(&WaveSystem { operator: WaveOperator::mixed(lambda, mu), initial_row: row }, rows)
}

pub fn geronimus_simulation_with(n: usize, rows: usize) -> Result<CoefficientGrid, Error> {
    let (half, three) = (UltraParam::new(0.5)?, UltraParam::new(1.5)?);
    let row = f_mixed_table_extended(half, three, n - 1, 0)?.into_iter().map(|r| r[0]).collect();
    wave_simulate(&WaveSystem { operator: WaveOperator::geronimus(), initial_row: row }, rows)
}

pub fn legendre_simulation() -> Result<CoefficientGrid, Error> {
    ultraspherical_simulation(UltraParam::new(0.5)?, ROW_LEN, ROWS)
}

pub fn geronimus_simulation() -> Result<CoefficientGrid, Error> {
    geronimus_simulation_with(ROW_LEN, ROWS)
}

/// Records for the chosen rows (all rows when `rows` is empty), each with
/// its row energy over the defined entries.
pub fn sim_records(grid: &CoefficientGrid, rows: &[usize]) -> Vec<SimRecord> {
    let lambda = grid.family.lambda().unwrap_or(f64::NAN);
    let all: Vec<usize> = (0..=grid.jmax).collect();
    let rows = if rows.is_empty() { &all[..] } else { rows };
    let mut out = Vec::new();
    for &j in rows.iter().filter(|&&j| j <= grid.jmax) {
        let energy = row_energy(grid, j);
        for i in 0..=grid.imax {
            out.push(SimRecord {
                i,
                j,
                lambda,
                value: grid.get(i, j),
                method: grid.method.name().to_string(),
                flag: grid.flag(i, j).name().to_string(),
                energy,
            });
        }
    }
    out
}

/// File name and CSV text for each data file of a figure.
pub fn render(fig: Figure) -> Result<Vec<(String, Vec<u8>)>, Error> {
    let mut files = Vec::new();
    let mut push = |name: String, recs: Vec<SimRecord>| {
        let mut buf = Vec::new();
        write_records(&recs, Format::Csv, &mut buf).expect("writing to memory");
        files.push((name, buf));
    };
    match fig {
        Figure::MovingWave => {
            let g = legendre_simulation()?;
            push("fig1_legendre_rows.csv".to_string(), sim_records(&g, &[0, 5, 10, 15, 20]));
        }
        Figure::LambdaSweep => {
            for l in [0.6, 1.0, 1.5] {
                let g = ultraspherical_simulation(UltraParam::new(l)?, ROW_LEN, 15)?;
                push(format!("fig2_lambda_{l}.csv"), sim_records(&g, &[15]));
            }
        }
        Figure::Geronimus => {
            let g = geronimus_simulation()?;
            push("fig3_geronimus_rows.csv".to_string(), sim_records(&g, &[5, 10, 15]));
        }
    }
    Ok(files)
}
