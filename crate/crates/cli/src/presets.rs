//! Shipped run and sweep configurations. Each is an ordinary config file
//! embedded as text, so `presets --write` hands the user editable copies
//! and the binary can run them by name.

/// Single-run presets: (name, description, config text).
pub const RUN_PRESETS: [(&str, &str, &str); 3] = [
    (
        "paper-fig-alpha1",
        "critical-order dissipation on the reference bump; runs to t = 10",
        r#"# Reference bump 1 - e^{-x^2}(1 - x^2/pi^2) under critical dissipation
# (alpha = 1, nu = 0.5, M = 0.5, no conservative term). Completes to t = 10
# with the gradient staying bounded. Raise n_nodes to 16384 for the
# full-resolution variant.
n_nodes = 1024
t_end = 10.0
diagnostic_cadence = 0.05
initial_data = "paper-fig"

[params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.0
m_ratio = 0.5

[step]
mode = "cfl-adaptive"
cfl_number = 0.4
max_dt = 0.01

[output]
profile_times = [0.0, 1.0, 5.0, 10.0]
"#,
    ),
    (
        "smooth-positive-diffusion",
        "strictly positive smooth data; the regime where every balance law is checkable",
        r#"# Strictly positive data 0.5 + 0.4 sin x, fixed small step. Both entropy
# balances, the energy identity, the maximum principle, and the decay
# envelope all apply and are recorded over t in [0, 1].
n_nodes = 1024
t_end = 1.0
diagnostic_cadence = 0.01
initial_data = "smooth-positive"

[params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.0
m_ratio = 0.5

[step]
mode = "fixed-dt"
dt = 0.001

[output]
profile_times = [0.0, 0.5, 1.0]
"#,
    ),
    (
        "inviscid-virial",
        "no regularization at all; tracks the virial functional into gradient blow-up",
        r#"# Pure transport (nu = mu = 0) from the blow-up seed sin^2(x/2), with the
# weighted virial functional tracked along the stagnant characteristic at
# the origin. Terminates with a resolution-loss verdict shortly after the
# shock forms near t = 0.4.
n_nodes = 1024
t_end = 1.2
diagnostic_cadence = 0.05
initial_data = "blowup-seed"

[params]
alpha = 1.0
beta = 1.0
nu = 0.0
mu = 0.0
m_ratio = 0.5

[step]
mode = "cfl-adaptive"
cfl_number = 0.4
max_dt = 0.01

[virial]
enabled = true
delta = 0.1

[output]
profile_times = [0.0, 0.2, 0.35]
"#,
    ),
];

/// Sweep presets: (name, description, sweep-spec text).
pub const SWEEP_PRESETS: [(&str, &str, &str); 2] = [
    (
        "blowup-sweep",
        "dissipation order sweep alpha in {0.25, 0.5, 0.75, 1}; sub-unit orders blow up",
        r#"# Order sweep of the dissipative term on the reference bump. The three
# runs with alpha < 1 end in gradient blow-up / resolution loss; alpha = 1
# completes to t = 10. n_nodes = 4096 is the fast default; 16384 is the
# full-resolution variant. The cadence is fine enough to resolve the 20x
# gradient-growth crossing from the later under-resolution trip even for
# the steepest front (alpha = 0.25 crosses at t = 0.1875, trips at 0.2).
workers = 4

[base]
n_nodes = 4096
t_end = 10.0
diagnostic_cadence = 0.0125
initial_data = "paper-fig"

[base.params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.0
m_ratio = 0.5

[base.step]
mode = "cfl-adaptive"
cfl_number = 0.4
max_dt = 0.01

# The bump's mean mode carries most of the spectral energy, which dilutes
# the tail fraction; the default 1e-4 would let the alpha = 0.75 front ride
# the dealiasing band without tripping. 1e-7 sits orders of magnitude above
# both the round-off floor and the resolved alpha = 1 tail.
[base.monitor]
tail_fraction_threshold = 1e-7

[[axes]]
param = "alpha"
values = [0.25, 0.5, 0.75, 1.0]
"#,
    ),
    (
        "damped-sweep",
        "conservative term switched on (mu = 0.5) at matched orders; all runs complete",
        r#"# Same sub-unit orders as blowup-sweep but with the conservative
# regularization active at matching order (alpha = beta, mu = 0.5). The
# modal divisor tames the transport term: every run completes to t = 10.
workers = 3

[base]
n_nodes = 4096
t_end = 10.0
diagnostic_cadence = 0.05
initial_data = "paper-fig"

[base.params]
alpha = 1.0
beta = 1.0
nu = 0.5
mu = 0.5
m_ratio = 0.5

[base.step]
mode = "cfl-adaptive"
cfl_number = 0.4
max_dt = 0.01

[[axes]]
param = "alpha-beta"
values = [0.25, 0.5, 0.75]
"#,
    ),
];

pub fn run_preset(name: &str) -> Option<&'static str> {
    RUN_PRESETS.iter().find(|(n, _, _)| *n == name).map(|(_, _, t)| *t)
}

pub fn sweep_preset(name: &str) -> Option<&'static str> {
    SWEEP_PRESETS.iter().find(|(n, _, _)| *n == name).map(|(_, _, t)| *t)
}
