use qar::poisson::*;
use qar::thermo::*;
use qar::gaussian::cop_otto;

fn main() {
    // reproduce the criterion-7 failing point: d=1, omega_c ~ 3.2162e-4
    let omega_h = 10.0;
    let t_hot = 2.0;
    for t_c in [2.11e-4f64, 1.274e-4, 1e-3] {
        for xfac in [1.5, 1.525, 1.6] {
            let omega_c = xfac * t_c;
            let noise = PoissonNoiseSpec::delta(omega_c, std::f64::consts::FRAC_PI_2).unwrap();
            let kick = kick_moments(&noise);
            let pair = OscillatorPair::new(omega_h, omega_c).unwrap();
            let frame = dressed_frame(&pair, kick.epsilon).unwrap();
            let hot = DressedRateSet::spectral(&frame, &BathSpec::hot(t_hot, 1, 1.0).unwrap()).unwrap();
            let cold = DressedRateSet::spectral(&frame, &BathSpec::cold(t_c, 1, 1.0).unwrap()).unwrap();
            let c = steady_currents(&frame, &hot, &cold, &kick, SolveMode::LowT).unwrap();
            let machine = c.j_cold / c.j_noise;
            let dressed = cop_poisson(&frame).unwrap();
            let otto = cop_otto(&pair).unwrap();
            println!("t_c={t_c:.3e} x={xfac}: machine={machine:.12e} dressed={dressed:.12e} otto={otto:.12e}");
            println!("   machine-dressed={:.3e} dressed-otto={:.3e} machine-otto={:.3e}",
                machine - dressed, dressed - otto, machine - otto);
            println!("   Om={:.8e}/{:.8e} eps={:.6e} jc={:.6e} jn={:.6e} z-based", frame.omega_minus, frame.omega_plus, kick.epsilon, c.j_cold, c.j_noise);
        }
    }
}
