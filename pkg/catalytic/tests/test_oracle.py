import math
from fractions import Fraction

from django.test import SimpleTestCase

from catalytic.exceptions import EmptyGraph, HeadOutOfBounds, NotHalting
from catalytic.hashprg import identity_prg
from catalytic.machine import (
    HaltKind, bundled_machine_names, halt_configuration, load_machine, parse_machine,
    start_configuration,
)
from catalytic.oracle import (
    BOTTOM, avg_size_bound, avg_tau_beta_size, compute_Vi, estimate_fractions, exit_probability,
    halt_distribution, prg_error_gamma, random_walk_decider, reach_probabilities,
    reset_target_uniqueness, tau_beta_graph, tau_beta_nodes, tau_multiplicity, walk_params,
)
from catalytic.simulator import default_horizon


class DistributionTests(SimpleTestCase):

    def test_coinflip(self):
        dist = halt_distribution(load_machine('bundled:coinflip'), '1', '00', 4)
        self.assertEqual(dist, {
            (HaltKind.ACCEPT, '00'): Fraction(1, 2),
            (HaltKind.ACCEPT, '10'): Fraction(1, 2),
        })

    def test_horizon(self):
        machine = load_machine('bundled:long_chain')
        with self.assertRaises(NotHalting):
            halt_distribution(machine, '1', '0', 1)
        self.assertEqual(halt_distribution(machine, '1', '0', 1, strict=False), {None: 1})

    def test_coin_off_the_tape(self):
        machine = parse_machine(
            'states=start,acc,rej\nstart=start\naccept=acc\nreject=rej\ns=3\nc=1\nrandomized=true\n'
            'start * * * 0 -> acc * * S S S\nstart * * * 1 -> acc * * S S L\n'
        )
        with self.assertRaises(HeadOutOfBounds):
            halt_distribution(machine, '1', '0', 4)
        dist = halt_distribution(machine, '1', '0', 4, strict=False)
        self.assertEqual(dist, {(HaltKind.ACCEPT, '0'): Fraction(1, 2), None: Fraction(1, 2)})
        self.assertEqual(sum(dist.values()), 1)

    def test_reach_table(self):
        machine = load_machine('bundled:long_chain')
        table = reach_probabilities(machine, '1', '0', 8)
        start = start_configuration(machine, '0')
        self.assertEqual(table.row(start), (1, 0, 0))
        self.assertEqual(table.row(start, 2), (0, 0, 1))
        self.assertEqual(table.row(start_configuration(machine, '1')), (0, 0, 1))
        lines = list(table.export_lines())
        self.assertTrue(all(line.count(',') == 4 for line in lines))


class TauBetaTests(SimpleTestCase):

    def test_coinflip_exit(self):
        machine = load_machine('bundled:coinflip')
        graph = tau_beta_graph(machine, '1', '00', Fraction(1, 2), default_horizon(machine, 1))
        self.assertEqual(len(graph.vertices), 2)
        self.assertEqual(graph.bottom_edges, 1)
        self.assertIn((graph.start, 1, BOTTOM), graph.edges)
        self.assertEqual(exit_probability(graph), Fraction(1, 2))

    def test_empty_graph(self):
        machine = load_machine('bundled:coinflip')
        graph = tau_beta_graph(machine, '1', '00', Fraction(3, 4), default_horizon(machine, 1))
        self.assertFalse(graph.vertices)
        with self.assertRaises(EmptyGraph):
            exit_probability(graph)

    def test_multiplicity(self):
        beta = Fraction(1, 2)
        for name in bundled_machine_names():
            machine = load_machine(f'bundled:{name}')
            counts = tau_multiplicity(machine, '1', beta, default_horizon(machine, 1))
            with self.subTest(name=name):
                self.assertLessEqual(max(counts.values(), default=0), math.floor(1 / beta))

    def test_size_bound(self):
        self.assertEqual(avg_size_bound(load_machine('bundled:accept_once'), Fraction(1, 2)), 9216)

    def test_nodes_hold_the_graph(self):
        machine = load_machine('bundled:coinflip')
        horizon = default_horizon(machine, 1)
        nodes = tau_beta_nodes(machine, '1', '00', Fraction(1, 2), horizon)
        graph = tau_beta_graph(machine, '1', '00', Fraction(1, 2), horizon)
        self.assertLessEqual(graph.vertices, nodes)
        self.assertIn(halt_configuration(machine, HaltKind.ACCEPT, '00'), nodes)

    def test_average_size_within_bound(self):
        machine = load_machine('bundled:accept_once')
        beta = Fraction(1, 2)
        size = avg_tau_beta_size(machine, '1', beta, default_horizon(machine, 1))
        self.assertGreater(size, 0)
        self.assertLessEqual(size, avg_size_bound(machine, beta))


class WalkTests(SimpleTestCase):

    def test_walk_params(self):
        params = walk_params(0, Fraction(1, 4), 3)
        self.assertEqual((params.beta, params.gamma, params.T), (Fraction(1, 2), 0, 15))
        self.assertEqual(params.length, 15 * 2 ** 12)
        self.assertEqual(params.eta, Fraction(9, 20))

    def test_random_walk_decider(self):
        machine = load_machine('bundled:accept_once')
        self.assertEqual(random_walk_decider(machine, '1', 1), 1)
        self.assertEqual(random_walk_decider(machine, '1', 0), 0)
        self.assertEqual(random_walk_decider(machine, '1', 1, exact=False, trials=20), 1)

    def test_uniqueness(self):
        machine = load_machine('bundled:accept_once')
        report = reset_target_uniqueness(machine, '1', 2, default_horizon(machine, 1))
        self.assertTrue(report.holds)
        self.assertGreater(report.checked, 0)
        vacuous = reset_target_uniqueness(load_machine('bundled:coinflip'), '1', 2, 16)
        self.assertTrue(vacuous.vacuous)
        self.assertFalse(vacuous.holds)


class SeedSweepTests(SimpleTestCase):

    def test_fractions_of_a_sure_accept(self):
        machine = load_machine('bundled:accept_once')
        self.assertEqual(estimate_fractions(machine, '1', '0', identity_prg(2, 1)), (1, 0))

    def test_level_zero_sets(self):
        machine = load_machine('bundled:accept_once')
        prg = identity_prg(2, 1)
        roots = {halt_configuration(machine, kind, '0') for kind in (HaltKind.ACCEPT, HaltKind.REJECT)}
        self.assertEqual(compute_Vi(machine, '1', '0', prg, 0), roots)
        self.assertEqual(prg_error_gamma(machine, '1', '0', prg, 0), (0, 0))
