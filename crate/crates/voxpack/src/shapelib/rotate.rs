use std::sync::LazyLock;

use super::shape::OccGrid;
use super::ShapeError;

pub const ORIENTATION_COUNT: usize = 24;
pub const SPIN_COUNT: u8 = 4;

/// Row-major 3x3 integer matrix; entries are -1, 0, or 1.
pub type Mat3 = [[i32; 3]; 3];

/// The 24 rotation matrices of the cube, enumerated deterministically:
/// axis permutations in lexicographic order, sign patterns in lexicographic
/// order (`+` before `-`), keeping only determinant +1. Index 0 is the
/// identity.
static ORIENTATIONS: LazyLock<[Mat3; ORIENTATION_COUNT]> = LazyLock::new(|| {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let signs: [[i32; 3]; 8] = [
        [1, 1, 1],
        [1, 1, -1],
        [1, -1, 1],
        [1, -1, -1],
        [-1, 1, 1],
        [-1, 1, -1],
        [-1, -1, 1],
        [-1, -1, -1],
    ];
    let mut out = [[[0i32; 3]; 3]; ORIENTATION_COUNT];
    let mut k = 0;
    for perm in perms {
        for sign in signs {
            let mut m = [[0i32; 3]; 3];
            for (row, (&p, &s)) in perm.iter().zip(sign.iter()).enumerate() {
                m[row][p] = s;
            }
            if det3(&m) == 1 {
                out[k] = m;
                k += 1;
            }
        }
    }
    assert_eq!(k, ORIENTATION_COUNT);
    assert_eq!(out[0], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    out
});

fn det3(m: &Mat3) -> i32 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn orientations() -> &'static [Mat3; ORIENTATION_COUNT] {
    &ORIENTATIONS
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0i32; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat_index(m: &Mat3) -> usize {
    ORIENTATIONS
        .iter()
        .position(|o| o == m)
        .expect("product of rotation matrices is a rotation matrix")
}

/// Index of `outer * inner` (apply `inner` first).
pub fn compose_orientations(outer: usize, inner: usize) -> usize {
    mat_index(&mat_mul(&ORIENTATIONS[outer], &ORIENTATIONS[inner]))
}

pub fn inverse_orientation(idx: usize) -> usize {
    let m = &ORIENTATIONS[idx];
    // Rotation inverse = transpose.
    let t = [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ];
    mat_index(&t)
}

/// Orientation index of the counter-clockwise quarter-turn about +z,
/// applied `spin` times (viewed from +z looking down).
pub fn spin_z_index(spin: u8) -> Result<usize, ShapeError> {
    if spin >= SPIN_COUNT {
        return Err(ShapeError::BadSpin(spin));
    }
    // CCW quarter-turn about z: (x, y, z) -> (-y, x, z).
    let quarter: Mat3 = [[0, -1, 0], [1, 0, 0], [0, 0, 1]];
    let mut m = ORIENTATIONS[0];
    for _ in 0..spin {
        m = mat_mul(&quarter, &m);
    }
    Ok(mat_index(&m))
}

/// Rotates an occupancy grid by orientation `idx` and re-anchors the result
/// at the origin. Each voxel is mapped through the matrix as a cell center.
pub fn rotate24(grid: &OccGrid, idx: usize) -> Result<OccGrid, ShapeError> {
    if idx >= ORIENTATION_COUNT {
        return Err(ShapeError::BadOrientation(idx));
    }
    let m = &ORIENTATIONS[idx];
    let mapped: Vec<(i64, i64, i64)> = grid
        .voxels()
        .into_iter()
        .map(|(x, y, z)| {
            let v = [x as i64, y as i64, z as i64];
            (
                (0..3).map(|k| m[0][k] as i64 * v[k]).sum(),
                (0..3).map(|k| m[1][k] as i64 * v[k]).sum(),
                (0..3).map(|k| m[2][k] as i64 * v[k]).sum(),
            )
        })
        .collect();
    let min = mapped.iter().fold((i64::MAX, i64::MAX, i64::MAX), |a, b| {
        (a.0.min(b.0), a.1.min(b.1), a.2.min(b.2))
    });
    let max = mapped.iter().fold((i64::MIN, i64::MIN, i64::MIN), |a, b| {
        (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2))
    });
    let dims = (
        (max.0 - min.0 + 1) as u32,
        (max.1 - min.1 + 1) as u32,
        (max.2 - min.2 + 1) as u32,
    );
    let mut out = OccGrid::new(dims);
    for (x, y, z) in mapped {
        out.set((x - min.0) as u32, (y - min.1) as u32, (z - min.2) as u32, true);
    }
    Ok(out)
}
