#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "uhl/linalg.hpp"

namespace uhl::spinsys {

struct SpinParams {
    double j = 0.5;       // spin quantum number, 1/2 or 1
    double omega0 = 1.0;  // energy scale; sets the temperature unit
    double psi = 0.0;     // azimuthal angle of the loop, constant along it
};

struct AngularMomentumOps {
    int dim;  // 2j+1
    Mat jx, jy, jz;
};

struct ThermalSpinState {
    SpinParams params;
    double beta;       // inverse temperature, 1/T
    Mat hamiltonian;   // d x d Hermitian
    Eigen::VectorXd energies;  // ascending
    Eigen::VectorXd lambdas;   // Boltzmann weights, same order
    Mat eigenvectors;  // columns, phase-fixed

    Mat rho() const;
    int dim() const { return static_cast<int>(lambdas.size()); }
};

struct PurifiedState {
    int d;     // system dimension; amplitude vector has length d^2
    Vec amplitudes;  // system (x) ancilla, eigenbasis ordering, ancilla index fast
};

struct UhlmannProcess {
    double eta;                  // sech(beta*omega0/2)
    double theta_total_system;   // 2*pi for one longitude loop
    double theta_total_ancilla;  // eta * 2*pi
    Mat us, ua;
};

AngularMomentumOps angular_momentum(double j);

// H = omega0 (sin(theta)cos(psi) Jx + sin(theta)sin(psi) Jy + cos(theta) Jz)
Mat hamiltonian(const SpinParams& params, double theta);

ThermalSpinState thermal_state(const SpinParams& params, const Mat& h, double beta);
// separate beta = 0 constructor (uniform mixture), kept off the main path
ThermalSpinState infinite_temperature_state(const SpinParams& params, const Mat& h);

PurifiedState purify(const ThermalSpinState& state);

double eta(double beta, double omega0);

UhlmannProcess uhlmann_process(const ThermalSpinState& state);

cd loschmidt_amplitude(const ThermalSpinState& state, const UhlmannProcess& proc);

// |G| below this floor means we sit on a critical point and arg is indeterminate
inline constexpr double kAmplitudeFloor = 1e-9;

struct PhaseResult {
    double theta = 0.0;   // in (-pi, pi]
    bool critical = false;
};

PhaseResult uhlmann_phase(const ThermalSpinState& state, const UhlmannProcess& proc);

// discrete parallel transport around the longitude loop; independent of the
// closed-form Us/Ua route
PhaseResult holonomy_oracle(const ThermalSpinState& state, int steps);
cd holonomy_amplitude(const ThermalSpinState& state, int steps);

std::vector<double> critical_temperatures(double j, double t_min, double t_max,
                                          double resolution, double omega0 = 1.0);

// real-valued G(T) for the longitude loop (used by the root finder and tests)
double loschmidt_real(double j, double temperature, double omega0 = 1.0);

}  // namespace uhl::spinsys
