import numpy as np
import pytest

from quarnet.graph import Graph
from quarnet.rng import py_rng
from quarnet.simulate import (EpidemicParams, FractionAffected, InfectedCount,
                              NoQuarantine, SimError, TimeSeries,
                              UndefinedWidthError, degree_class_susceptibility,
                              detect_second_wave, fwhm, groupwise_survival,
                              run_sir)

from oracles import sir_jump_chain_exact, triangle_final_size_distribution

K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])
PATH4 = Graph(4, [(0, 1), (1, 2), (2, 3)])


class TestParams:
    def test_validation(self):
        with pytest.raises(SimError):
            EpidemicParams(-0.1, 1.0, 1)
        with pytest.raises(SimError):
            EpidemicParams(0.5, 0.0, 1)
        with pytest.raises(SimError):
            EpidemicParams(0.5, 1.0, 0)

    def test_policy_validation(self):
        with pytest.raises(SimError):
            FractionAffected((0.5, 0.3))
        with pytest.raises(SimError):
            FractionAffected((1.5,))
        with pytest.raises(SimError):
            InfectedCount(0)

    def test_empty_graph(self):
        with pytest.raises(SimError):
            run_sir(Graph(0, []), EpidemicParams(0.5, 1.0, 1))

    def test_rho_exceeds_n(self):
        with pytest.raises(SimError):
            run_sir(K3, EpidemicParams(0.5, 1.0, 5))


class TestDynamics:
    def test_edgeless_exact(self):
        g = Graph(40, [])
        o = run_sir(g, EpidemicParams(0.9, 1.0, 7), seed=5)
        assert o.final_removed_fraction == 7 / 40
        assert o.max_infected_fraction == 7 / 40

    def test_two_node_transmission_probability(self):
        g = Graph(2, [(0, 1)])
        p = EpidemicParams(1.0, 1.0, 1)
        wins = sum(run_sir(g, p, seed=s).final_removed_fraction == 1.0
                   for s in range(2000))
        assert abs(wins / 2000 - 0.5) < 0.05

    def test_beta_zero_no_spread(self):
        o = run_sir(K3, EpidemicParams(0.0, 1.0, 1), seed=1)
        assert o.final_removed_fraction == pytest.approx(1 / 3)

    def test_conservation_and_monotonicity(self):
        g = Graph(60, [(i, (i + 1) % 60) for i in range(60)]
                  + [(i, (i + 9) % 60) for i in range(60)])
        o = run_sir(g, EpidemicParams(1.5, 1.0, 3), FractionAffected((0.4,)),
                    seed=2, record_timeseries=True)
        ts = o.timeseries
        assert ((ts.s + ts.i + ts.r) == 60).all()
        assert (np.diff(ts.s) <= 0).all()
        assert (np.diff(ts.r) >= 0).all()
        assert (np.diff(ts.t) >= 0).all()

    def test_determinism(self):
        g = Graph(50, [(i, j) for i in range(50) for j in range(i + 1, min(i + 4, 50))])
        p = EpidemicParams(0.8, 1.0, 2)
        o1 = run_sir(g, p, FractionAffected((0.3, 0.6)), seed=9, record_timeseries=True)
        o2 = run_sir(g, p, FractionAffected((0.3, 0.6)), seed=9, record_timeseries=True)
        assert o1.final_removed_fraction == o2.final_removed_fraction
        assert np.array_equal(o1.timeseries.t, o2.timeseries.t)
        assert np.array_equal(o1.final_states, o2.final_states)

    def test_k3_matches_jump_chain(self):
        expect = triangle_final_size_distribution()
        assert expect == {1: pytest.approx(1 / 3), 2: pytest.approx(1 / 6),
                          3: pytest.approx(1 / 2)}
        counts = {1: 0, 2: 0, 3: 0}
        trials = 4000
        for s in range(trials):
            o = run_sir(K3, EpidemicParams(1.0, 1.0, 1), seed=s)
            counts[round(o.final_removed_fraction * 3)] += 1
        for k in (1, 2, 3):
            assert abs(counts[k] / trials - expect[k]) < 0.03

    def test_path4_matches_jump_chain(self):
        # asymmetric graph, unequal rates: chi-square against exact enumeration,
        # mixing over the uniformly random seed node
        from scipy.stats import chisquare
        beta, gamma = 2, 1
        expect = {}
        for seed_node in range(4):
            d = sir_jump_chain_exact(4, [(0, 1), (1, 2), (2, 3)], beta, gamma, [seed_node])
            for k, v in d.items():
                expect[k] = expect.get(k, 0.0) + v / 4
        trials = 4000
        counts = {k: 0 for k in expect}
        for s in range(trials):
            o = run_sir(PATH4, EpidemicParams(beta, gamma, 1), rng=py_rng(77, s))
            counts[round(o.final_removed_fraction * 4)] += 1
        f_exp = [expect[k] * trials for k in sorted(expect)]
        f_obs = [counts.get(k, 0) for k in sorted(expect)]
        _, p = chisquare(f_obs, f_exp)
        assert p > 0.01


class TestQuarantine:
    def make_graph(self):
        return Graph(200, [(i, (i + 1) % 200) for i in range(200)]
                     + [(i, (i + 13) % 200) for i in range(200)])

    def test_threshold_zero_fires_immediately(self):
        g = self.make_graph()
        o = run_sir(g, EpidemicParams(1.0, 1.0, 5), FractionAffected((0.0,)), seed=3)
        assert o.n_quarantines == 1
        assert o.quarantine_times[0] == 0.0
        assert o.affected_at_quarantine[0] == pytest.approx(5 / 200)

    def test_trigger_exactness(self):
        g = self.make_graph()
        for s in range(10):
            o = run_sir(g, EpidemicParams(2.0, 1.0, 5), FractionAffected((0.3,)), seed=s)
            if o.n_quarantines:
                assert o.affected_at_quarantine[0] >= 0.3
                # fired at the first event crossing: at most one node over
                assert o.affected_at_quarantine[0] <= 0.3 + 1 / 200 + 1e-12

    def test_quarantine_resets_infected_to_rho(self):
        g = self.make_graph()
        o = run_sir(g, EpidemicParams(2.0, 1.0, 5), FractionAffected((0.3,)),
                    seed=4, record_timeseries=True)
        assert o.n_quarantines == 1
        ts = o.timeseries
        tq = o.quarantine_times[0]
        idx = np.searchsorted(ts.t, tq, side="right") - 1
        assert ts.i[idx] == 5  # rho reseeds active right after the quarantine

    def test_multiple_thresholds_ascending(self):
        g = self.make_graph()
        o = run_sir(g, EpidemicParams(2.0, 1.0, 5), FractionAffected((0.2, 0.5)), seed=6)
        assert o.n_quarantines <= 2
        if o.n_quarantines == 2:
            assert o.quarantine_times[0] <= o.quarantine_times[1]
            assert o.affected_at_quarantine[1] >= 0.5 - 1e-9

    def test_reseed_shortfall(self):
        o = run_sir(K3, EpidemicParams(5.0, 1.0, 2), FractionAffected((0.5,)), seed=1)
        if o.n_quarantines:
            assert o.reseed_shortfall or o.susceptible_at_quarantine_end[0] >= 0

    def test_infected_count_storm_terminates(self):
        g = self.make_graph()
        o = run_sir(g, EpidemicParams(3.0, 1.0, 5), InfectedCount(5), seed=7)
        assert o.n_quarantines >= 1
        assert o.final_removed_fraction <= 1.0

    def test_infected_count_max_quarantines(self):
        g = self.make_graph()
        o = run_sir(g, EpidemicParams(3.0, 1.0, 5), InfectedCount(5, max_quarantines=3), seed=8)
        assert o.n_quarantines <= 3


class TestSecondWave:
    def test_no_infections_after_quarantine(self):
        # quarantine very late: nothing left to infect beyond reseeds
        g = Graph(30, [(i, (i + 1) % 30) for i in range(30)])
        o = run_sir(g, EpidemicParams(8.0, 1.0, 3), FractionAffected((0.9,)), seed=11)
        if o.n_quarantines and o.susceptible_at_quarantine_end[0] > 0:
            frac = o.infections_in_wave[1] / o.susceptible_at_quarantine_end[0]
            assert detect_second_wave(o, 0) == (frac >= 0.05)

    def test_all_remaining_infected_is_second_wave(self):
        g = Graph(400, [(i, j) for i in range(400) for j in range(i + 1, min(i + 5, 400))])
        o = run_sir(g, EpidemicParams(5.0, 0.5, 10), FractionAffected((0.2,)), seed=2)
        assert o.n_quarantines == 1
        assert detect_second_wave(o, 0)

    def test_index_out_of_range(self):
        o = run_sir(K3, EpidemicParams(1.0, 1.0, 1), seed=1)
        with pytest.raises(SimError):
            detect_second_wave(o, 0)


class TestFWHM:
    def test_triangular_pulse(self):
        # symmetric triangle of height 2h over [0, 2w]: FWHM = w
        ts = TimeSeries(t=np.array([0.0, 3.0, 6.0]), s=np.zeros(3),
                        i=np.array([0.0, 8.0, 0.0]), r=np.zeros(3), quarantine_times=[])
        assert fwhm(ts) == pytest.approx(3.0)

    def test_rectangular_pulse(self):
        ts = TimeSeries(t=np.array([0.0, 1.0, 1.0, 4.0, 4.0, 5.0]), s=np.zeros(6),
                        i=np.array([0.0, 0.0, 6.0, 6.0, 0.0, 0.0]), r=np.zeros(6),
                        quarantine_times=[])
        assert fwhm(ts) == pytest.approx(3.0)

    def test_monotone_window_undefined(self):
        ts = TimeSeries(t=np.array([0.0, 1.0, 2.0]), s=np.zeros(3),
                        i=np.array([1.0, 2.0, 4.0]), r=np.zeros(3), quarantine_times=[])
        with pytest.raises(UndefinedWidthError):
            fwhm(ts)

    def test_window_restriction(self):
        t = np.array([0.0, 1.0, 2.0, 3.0, 10.0, 11.0, 12.0, 13.0])
        i = np.array([0.0, 4.0, 0.0, 0.0, 0.0, 8.0, 8.0, 0.0])
        ts = TimeSeries(t=t, s=np.zeros(8), i=i, r=np.zeros(8), quarantine_times=[])
        w1 = fwhm(ts, window=(0, 3))
        w2 = fwhm(ts, window=(9, 13))
        assert w1 == pytest.approx(1.0)
        assert w2 == pytest.approx(0.5 + 1 + 0.5)


class TestGroupwise:
    def test_whole_population_identity(self):
        g = Graph(100, [(i, (i + 1) % 100) for i in range(100)])
        o = run_sir(g, EpidemicParams(4.0, 0.5, 5), seed=3, record_infection_order=True)
        curves = groupwise_survival(g, o, groups={"all": np.arange(100)})
        x, y = curves["all"]
        assert np.allclose(x, y)

    def test_requires_infection_order(self):
        g = Graph(10, [(i, (i + 1) % 10) for i in range(10)])
        o = run_sir(g, EpidemicParams(1.0, 1.0, 2), seed=1)
        with pytest.raises(SimError):
            groupwise_survival(g, o)

    def test_empty_group_rejected(self):
        g = Graph(10, [(i, (i + 1) % 10) for i in range(10)])
        o = run_sir(g, EpidemicParams(1.0, 1.0, 2), seed=1, record_infection_order=True)
        with pytest.raises(SimError):
            groupwise_survival(g, o, groups={"none": np.array([], dtype=int)})

    def test_degree_class_requires_degree_one(self):
        o = run_sir(K3, EpidemicParams(1.0, 1.0, 1), seed=1, record_infection_order=True)
        with pytest.raises(SimError):
            degree_class_susceptibility(K3, o, 0.95, (2,))
