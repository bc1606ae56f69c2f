use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("radius must be positive (got {radius})")]
    NonPositiveRadius { radius: f64 },
    #[error("discs {i} and {j} overlap or touch (separation deficit {deficit:.6e} m)")]
    Overlap { i: usize, j: usize, deficit: f64 },
    #[error("point is {distance:.3e} m off the disc boundary")]
    NotOnBoundary { distance: f64 },
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("polygon area {area:.3e} is too small")]
    DegeneratePolygon { area: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriangulationError {
    #[error("need ≥ 3 non-collinear centers (got {0} discs)")]
    TooFewDiscs(usize),
    #[error("need ≥ 3 non-collinear centers")]
    AllCollinear,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("discs {i} and {j} overlap or touch (slab width {width:.3e} m)")]
    OverlappingDiscs { i: usize, j: usize, width: f64 },
    #[error("triangle {0:?} is degenerate")]
    DegenerateTriangle([usize; 3]),
    #[error("feasible region of triangle {0:?} is empty")]
    EmptyRegion([usize; 3]),
    #[error("feasible region of triangle {triangle:?} has {vertices} vertices, outside 4..=6")]
    ShapeViolation { triangle: [usize; 3], vertices: usize },
    #[error("no candidate scan point in region lies outside every disc")]
    NoValidPoint,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VisibilityError {
    #[error("point ({x:.6}, {y:.6}) lies inside or on the disc")]
    InsideDisc { x: f64, y: f64 },
    #[error("scan point ({x:.6}, {y:.6}) lies inside or on disc {disc}")]
    PointInsideDisc { disc: usize, x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid forest spec: {0}")]
    InvalidSpec(String),
    #[error("could not place disc {index} without overlap after {attempts} attempts")]
    CannotPlace { index: usize, attempts: usize },
    #[error("unknown preset {0}; expected 1..=5")]
    UnknownPreset(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("disc {index}: {source}")]
    InvalidDisc { index: usize, source: GeomError },
    #[error(transparent)]
    Validation(#[from] GeomError),
    #[error("invalid document: {0}")]
    Schema(String),
}

/// Anything that stops a command before it produces a document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}
