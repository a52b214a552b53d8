"""
Hybrid-CSI power allocation on the X network
============================================

Instantaneous CSI for both hops gives the best sum rate but costs feedback
every coherence time on every link.  The hybrid strategy fixes the first
hop's split from statistics alone (sample-average optimization) and only
re-optimizes the second hop per realization, recovering most of the
instantaneous scheme's rate with far less signaling.

The same experiment is available from the command line:

    noma-relay sweep --preset fig6 --out fig6.csv
"""

from noma_relay import TrialPlan, make_scenario, run_trials

spec = make_scenario("x_network", {"S1R": 9.0, "S2R": 3.0, "RU1": 2.0, "RU2": 10.0})
trials = 800
seed = 20180001

print(f"x_network, variances (9, 3, 2, 10), {trials} common-draw trials per point\n")
print("  SNR(dB)   SCSI      HCSI      ICSI      FDMA     (ergodic sum rate)")
for snr in (0.0, 10.0, 20.0, 30.0):
    row = {}
    for strategy in ("scsi", "hcsi", "icsi"):
        plan = TrialPlan(spec=spec, strategy=strategy, snr_db=snr,
                         trials=trials, master_seed=seed)
        row[strategy] = run_trials(plan).ergodic_sum_rate
    fdma_spec = make_scenario("x_network", {"S1R": 9.0, "S2R": 3.0, "RU1": 2.0, "RU2": 10.0},
                              baseline="fdma")
    plan = TrialPlan(spec=fdma_spec, strategy="oma_baseline", snr_db=snr,
                     trials=trials, master_seed=seed)
    row["fdma"] = run_trials(plan).ergodic_sum_rate
    print(f"  {snr:5.0f}   {row['scsi']:7.4f}   {row['hcsi']:7.4f}   "
          f"{row['icsi']:7.4f}   {row['fdma']:7.4f}")

print("\nSCSI <= HCSI <= ICSI at every point; the hybrid scheme sits close to")
print("the instantaneous one while only tracking second-hop CSI per trial.")

# energy side of the story at one SNR point
plans = {
    s: TrialPlan(spec=spec, strategy=s, snr_db=20.0, trials=trials, master_seed=seed)
    for s in ("hcsi", "icsi")
}
print("\nat 20 dB with trimming (strategy default):")
for s, plan in plans.items():
    m = run_trials(plan)
    print(f"  {s}: normalized power utilization {m.normalized_power_utilization:.3f}, "
          f"energy efficiency {m.energy_efficiency:.4f} bits/s/Hz per unit power")
