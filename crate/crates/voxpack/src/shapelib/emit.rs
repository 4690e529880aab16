use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::ShapeError;
use super::SPIN_COUNT;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemItem {
    pub shape: String,
    /// Rotation-table index of the resting pose; always one of the shape's
    /// prepared poses.
    pub orientation: usize,
    pub spin: u8,
}

/// An item arrival sequence for one episode, reproducible from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSequence {
    /// Container dimensions in heightmap cells.
    pub container: (u32, u32, u32),
    /// Heightmap cell edge in centimeters.
    pub dh_cm: f64,
    pub seed: u64,
    pub items: Vec<ProblemItem>,
}

impl ProblemSequence {
    pub fn save(&self, path: &Path) -> Result<(), ShapeError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ShapeError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Integer number of heightmap cells per shape cell.
pub fn integer_scale(cell_cm: f64, dh_cm: f64) -> Result<u32, ShapeError> {
    let s = cell_cm / dh_cm;
    let rounded = s.round();
    if !(dh_cm > 0.0) || rounded < 1.0 || (s - rounded).abs() > 1e-9 {
        return Err(ShapeError::BadScale { cell_cm, dh_cm });
    }
    Ok(rounded as u32)
}

/// Draws items independently — shape uniform over the dataset, then pose
/// uniform over that shape's poses, then spin uniform — until the running
/// volume total first exceeds the container's capacity. The crossing item
/// is kept, so the sequence always slightly overfills the container.
///
/// Errors if any shape fails to fit the container in every (pose, spin),
/// or if a shape's cell size is not an integer multiple of `dh_cm`.
pub fn emit_problem(
    dataset: &Dataset,
    container: (u32, u32, u32),
    dh_cm: f64,
    seed: u64,
) -> Result<ProblemSequence, ShapeError> {
    let capacity = container.0 as u64 * container.1 as u64 * container.2 as u64;
    let mut scales = Vec::with_capacity(dataset.shapes.len());
    for prepared in &dataset.shapes {
        let s = integer_scale(prepared.shape.cell_cm, dh_cm)?;
        let fits = prepared.maps.iter().flatten().any(|m| {
            (m.width() as u64) * s as u64 <= container.0 as u64
                && (m.depth() as u64) * s as u64 <= container.1 as u64
                && (m.height as u64) * s as u64 <= container.2 as u64
        });
        if !fits {
            return Err(ShapeError::ShapeTooLarge(prepared.shape.name.clone()));
        }
        scales.push(s);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::new();
    let mut total = 0u64;
    while total <= capacity {
        let si = rng.gen_range(0..dataset.shapes.len());
        let prepared = &dataset.shapes[si];
        let pi = rng.gen_range(0..prepared.poses.len());
        let spin = rng.gen_range(0..SPIN_COUNT);
        total += prepared.shape.grid.volume() * (scales[si] as u64).pow(3);
        items.push(ProblemItem {
            shape: prepared.shape.name.clone(),
            orientation: prepared.poses[pi].orientation,
            spin,
        });
    }
    Ok(ProblemSequence { container, dh_cm, seed, items })
}
