//! The usage example from README.md, kept compiling and honest.

use entroqec::codes::repetition3;
use entroqec::cycle::run_cycle;
use entroqec::quantum::KrausChannel;

#[test]
fn readme_example_runs() -> Result<(), Box<dyn std::error::Error>> {
    let code = repetition3();
    let noise = KrausChannel::bit_flip_enlarged(0.1)?.restrict(&[0, 1, 2, 3])?;
    let rho = code.codewords()[0].density();
    let recovery = code
        .recovery()
        .expect("built-in repetition code ships recovery operators");
    let report = run_cycle(&code, &noise, recovery, &rho, true)?;
    assert!(report.delta_s_tot >= -1e-10);
    Ok(())
}
