"""When least squares goes unstable, the closed-form estimate does not.

Seed 816 is a known draw at Tbar = 1280 where the least-squares transition
estimate lands outside the unit circle.  No projection or optimization is
involved in the repair: the same covariance data, raised to matched
half-powers, is stable automatically.
"""

import numpy as np

from stablesid import (
    SubspaceConfig,
    build_lowdim_example,
    hinf_report,
    identify,
    pole_magnitudes,
    simulate_experiment,
)

model, input_model = build_lowdim_example()
data = simulate_experiment(model, input_model, 1280, seed=816)
result = identify(data, SubspaceConfig(f=10, p=36, n_hat=5))

print("least-squares transition estimate:")
print("  pole magnitudes:", np.round(pole_magnitudes(result.ls.A_star), 5))
print(f"  spectral radius: {result.diagnostics['rho_A_star']:.6f}  <- unstable")
print()
print("closed-form stable estimate from the same data:")
print("  pole magnitudes:", np.round(pole_magnitudes(result.A_hat), 5))
print(f"  spectral radius: {result.diagnostics['rho_A_hat']:.6f}")
print(f"  correlation bound sigma(R) = {result.diagnostics['sigma_R']:.6f} < 1")
print()
print("true pole magnitudes:", np.round(pole_magnitudes(model.A), 5))

report = hinf_report(model, result.estimated_model())
print(f"\nfrequency errors vs truth: hard = {report.hard_error:.1f}, "
      f"soft = {report.soft_error:.3f}")
print("\nThe transform behind the repair removes the input drive first:")
print(f"  Sylvester residual of M_hat: {result.diagnostics['sylvester_residual']:.2e}")
