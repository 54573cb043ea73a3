from types import SimpleNamespace

# NOTE: All distances are chordal unless the name says otherwise
TOLERANCE = SimpleNamespace(
    point=1e-9,  # SpherePoint equality
    cluster=1e-6,  # merging root clusters into multiplicities
    taylor=1e-8,  # relative Taylor threshold for valency
    orbit_return=1e-8,  # forward-orbit return test
    neutral=1e-6,  # |multiplier - 1| below this is neutral
    coprime=1e-10,  # common roots when building maps from floats
    resultant=1e-6,  # least chordal distance between a zero and a pole
    residual=1e-6,  # relative root residual before RootFindingError
    spot_check=1e-8,  # parsed expression against extracted coefficients
)

# NOTE: exact_bits bounds numerator and denominator of each Gaussian-rational
# part, which keeps float conversion overflow-free
ORBIT = SimpleNamespace(
    horizon=200,
    stabilization_run=20,
    exact_bits=1000,
    capture_radius=1e-3,
    ambiguity_factor=10.0,
    max_attracting_period=16,
    class_depth=6,
    class_node_cap=4096,
    ce_burn_in=10,
)

TREE = SimpleNamespace(depth=10, node_budget=2_000_000, progress_every=4)

# NOTE: tail_tolerance is relative to the partial sum
POINCARE = SimpleNamespace(depth=12, tail_margin=0.05, tail_tolerance=0.05, fit_skip=2)

# TODO: Expose cloud_cap on the command line once the measure command grows
# a streaming writer
THERMO = SimpleNamespace(
    pressure_depth=14,
    seeds=3,
    burn_in=40,
    estimator="birkhoff",
    bowen_estimator="ratio",
    bracket=(0.0, 2.0),
    bowen_tol=1e-4,
    min_error=1e-3,
    monotone_grid=9,
    drift_tol=1e-3,
    max_iterations=200,
    min_generations=12,
    lyubich_depth=16,
    cloud_cap=1 << 17,
    cells=64,
    progress_every=4,
)

JULIA = SimpleNamespace(
    resolution=512,
    max_resolution=4096,
    max_iterations=256,
    scatter_points=200_000,
    burn_in=32,
    window=2.0,
    interior="black",
    palette=("midnightblue", "gold"),
)

OUTPUT = SimpleNamespace(
    schema_version="1.0",
    binary_magic=b"KMSC",
    binary_version=1,
    software_tag="kmsdyn",
)
