import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from obfuscation_backend.fields import UINT64_MAX
from text_codec.vocab import IndexSequence, build_vocab, encode_text, frame_text

from .config import Seq2SeqConfig, reference_config
from .exceptions import InvalidConfig, NumericalDivergence
from .model import EncoderState, decode_greedy, encode, softmax
from .training import RMSprop, loss_and_gradients, train_step, train_to_target
from .weights import ARRAY_NAMES, ModelWeights, init_random, init_trainable, zeros


def tiny_config(hidden_size=3, input_vocab_size=2, output_vocab_size=4, **values):
    return Seq2SeqConfig(hidden_size, input_vocab_size, output_vocab_size, **values)


class ConfigTests(SimpleTestCase):
    def test_rejects_invalid_values(self):
        bad = [
            dict(hidden_size=0),
            dict(input_vocab_size=-1),
            dict(max_decode_len=0),
            dict(learning_rate=0.0),
            dict(max_iterations=-1),
            dict(max_iterations=10, check_interval=20),
            dict(seed=-1),
            dict(seed=UINT64_MAX + 1),
        ]
        for values in bad:
            with self.assertRaises(InvalidConfig, msg=values):
                tiny_config(**values)

    def test_zero_iterations_allowed(self):
        self.assertEqual(tiny_config(max_iterations=0).max_iterations, 0)

    def test_dict_round_trip(self):
        config = tiny_config(seed=UINT64_MAX)
        self.assertEqual(Seq2SeqConfig.from_dict(config.to_dict()), config)


class WeightsTests(SimpleTestCase):
    def test_reference_layout(self):
        weights = zeros(reference_config())
        self.assertEqual(weights.leading_dims(), [39, 256, 1024, 72, 256, 1024, 256, 72])
        self.assertEqual(weights.layout_value_count(), 975_872)
        self.assertEqual(weights.parameter_count(), 658_504)
        self.assertTrue(weights.matches(reference_config()))

    def test_init_random_is_seeded(self):
        config = tiny_config(seed=42)
        first, second = init_random(config, 10), init_random(config, 10)
        self.assertTrue(first.bitwise_equal(second))
        self.assertFalse(init_random(config, 1).bitwise_equal(init_random(config, 2)))
        self.assertFalse(first.bitwise_equal(init_random(config.replace(seed=43), 10)))

    def test_init_random_range_and_dtype(self):
        weights = init_random(tiny_config(seed=1), 3)
        for name, arr in weights.items():
            self.assertEqual(arr.dtype, np.float32, name)
            self.assertTrue((np.abs(arr) <= 0.5).all(), name)

    def test_randomness_index_must_be_positive(self):
        with self.assertRaises(InvalidConfig):
            init_random(tiny_config(), 0)

    def test_init_trainable_sets_forget_bias(self):
        weights = init_trainable(tiny_config(seed=5))
        np.testing.assert_array_equal(weights.enc_bias[3:6], 1.0)
        np.testing.assert_array_equal(weights.dec_bias[3:6], 1.0)
        self.assertTrue((np.abs(weights.proj_kernel) <= 0.08).all())


class EncodeTests(SimpleTestCase):
    def test_empty_input_gives_zero_state(self):
        state = encode(init_random(tiny_config(), 1), IndexSequence((), 2))
        np.testing.assert_array_equal(state.hidden, np.zeros(3))
        np.testing.assert_array_equal(state.cell, np.zeros(3))

    def test_zero_weights_give_zero_state(self):
        state = encode(zeros(tiny_config()), IndexSequence((0, 1, 1), 2))
        np.testing.assert_array_equal(state.hidden, np.zeros(3))

    def test_matches_scalar_recurrence(self):
        weights = init_random(tiny_config(seed=9), 1)
        state = encode(weights, IndexSequence((0, 1), 2))

        def sig(v):
            return 1.0 / (1.0 + math.exp(-v))

        wx = weights.enc_input_kernel.astype(float).tolist()
        wh = weights.enc_recurrent_kernel.astype(float).tolist()
        b = weights.enc_bias.astype(float).tolist()
        h, c = [0.0] * 3, [0.0] * 3
        for x in (0, 1):
            z = [wx[x][k] + sum(h[j] * wh[j][k] for j in range(3)) + b[k] for k in range(12)]
            c = [sig(z[3 + u]) * c[u] + sig(z[u]) * math.tanh(z[6 + u]) for u in range(3)]
            h = [sig(z[9 + u]) * math.tanh(c[u]) for u in range(3)]

        np.testing.assert_allclose(state.hidden, h, atol=1e-12)
        np.testing.assert_allclose(state.cell, c, atol=1e-12)


class DecodeTests(SimpleTestCase):
    def setUp(self):
        self.vocab = build_vocab('ab', with_markers=True)
        self.config = tiny_config(output_vocab_size=self.vocab.size)

    def test_eos_bias_stops_immediately(self):
        weights = zeros(self.config)
        weights.proj_bias[self.vocab.eos_index] = 10.0
        self.assertEqual(decode_greedy(weights, EncoderState.zeros(3), self.vocab, 5), '')

    def test_sos_is_never_emitted(self):
        weights = zeros(self.config)
        weights.proj_bias[self.vocab.sos_index] = 10.0
        weights.proj_bias[self.vocab.index_of['b']] = 5.0
        self.assertEqual(decode_greedy(weights, EncoderState.zeros(3), self.vocab, 4), 'bbbb')

    def test_suppressed_characters(self):
        weights = zeros(self.config)
        weights.proj_bias[self.vocab.index_of['b']] = 5.0
        weights.proj_bias[self.vocab.index_of['a']] = 4.0
        self.assertEqual(decode_greedy(weights, EncoderState.zeros(3), self.vocab, 3, suppress='b'), 'aaa')

    def test_requires_markers_and_positive_length(self):
        weights = zeros(self.config)
        with self.assertRaises(ValueError):
            decode_greedy(weights, EncoderState.zeros(3), build_vocab('abcd'), 3)
        with self.assertRaises(ValueError):
            decode_greedy(weights, EncoderState.zeros(3), self.vocab, 0)

    @settings(deadline=None, max_examples=50)
    @given(st.integers(min_value=0, max_value=2 ** 32), st.integers(min_value=1, max_value=30))
    def test_output_capped_and_in_vocabulary(self, seed, max_len):
        weights = init_random(self.config.replace(seed=seed), 1)
        state = encode(weights, IndexSequence((0, 1), 2))
        text = decode_greedy(weights, state, self.vocab, max_len)
        self.assertLessEqual(len(text), max_len)
        self.assertTrue(set(text) <= set(self.vocab.symbols))

    def test_softmax_sums_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            probs = softmax(rng.normal(scale=30, size=7))
            self.assertAlmostEqual(probs.sum(), 1.0, delta=1e-6)


class TrainingTests(SimpleTestCase):
    def setUp(self):
        self.in_vocab = build_vocab('xy')
        self.out_vocab = build_vocab('ab', with_markers=True)
        self.inputs = encode_text('xyx', self.in_vocab)

    def test_uniform_model_loss_is_log_vocab(self):
        config = tiny_config(output_vocab_size=self.out_vocab.size)
        loss, _ = loss_and_gradients(zeros(config), self.inputs, frame_text('ab', self.out_vocab))
        self.assertAlmostEqual(loss, math.log(self.out_vocab.size), places=12)

    def test_gradients_match_finite_differences(self):
        config = tiny_config(seed=3)
        weights = init_random(config, 1).astype(np.float64)
        target = frame_text('a', self.out_vocab)
        self.assertEqual(len(target), 3)
        _, grads = loss_and_gradients(weights, self.inputs, target)

        eps = 1e-3
        for name in ARRAY_NAMES:
            arr = getattr(weights, name)
            numeric = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                original = arr[idx]
                arr[idx] = original + eps
                plus, _ = loss_and_gradients(weights, self.inputs, target)
                arr[idx] = original - eps
                minus, _ = loss_and_gradients(weights, self.inputs, target)
                arr[idx] = original
                numeric[idx] = (plus - minus) / (2 * eps)
            scale = np.maximum(np.maximum(np.abs(grads[name]), np.abs(numeric)), 1e-3)
            error = np.abs(grads[name] - numeric) / scale
            self.assertLessEqual(error.max(), 1e-3, name)

    def test_loss_decreases(self):
        config = tiny_config(hidden_size=8, output_vocab_size=self.out_vocab.size, seed=2)
        weights = init_trainable(config)
        target = frame_text('abba', self.out_vocab)
        optimizer = RMSprop()
        losses = []
        for _ in range(50):
            weights, loss = train_step(weights, self.inputs, target, 1e-2, optimizer)
            losses.append(loss)
        self.assertLess(losses[-1], losses[0])
        self.assertLess(np.mean(losses[-10:]), np.mean(losses[:10]))
        self.assertTrue(weights.matches(config))
        self.assertEqual(weights.enc_bias.dtype, np.float32)

    def test_non_finite_weights_diverge(self):
        config = tiny_config(output_vocab_size=self.out_vocab.size)
        weights = zeros(config)
        weights.proj_bias[0] = np.inf
        with self.assertRaises(NumericalDivergence):
            train_step(weights, self.inputs, frame_text('ab', self.out_vocab), 1e-2)

    def test_train_to_target_memorizes(self):
        config = tiny_config(hidden_size=8, output_vocab_size=self.out_vocab.size, seed=4,
                             max_iterations=2000, check_interval=10)
        target = frame_text('ab', self.out_vocab)
        result = train_to_target(init_trainable(config), self.inputs, target, self.out_vocab, config)

        self.assertTrue(result.success)
        self.assertEqual(result.iterations_used % 10, 0)
        state = encode(result.weights, self.inputs)
        self.assertEqual(decode_greedy(result.weights, state, self.out_vocab, 3), 'ab')

        again = train_to_target(result.weights, self.inputs, target, self.out_vocab, config)
        self.assertTrue(again.success)
        self.assertEqual(again.iterations_used, 0)

    def test_zero_iterations_without_match(self):
        config = tiny_config(output_vocab_size=self.out_vocab.size, max_iterations=0)
        weights = zeros(config)
        weights.proj_bias[self.out_vocab.eos_index] = 10.0
        result = train_to_target(weights, self.inputs, frame_text('ab', self.out_vocab),
                                 self.out_vocab, config)
        self.assertFalse(result.success)
        self.assertEqual(result.iterations_used, 0)
        self.assertGreater(result.final_loss, 0)

    def test_no_early_stop_runs_full_budget(self):
        config = tiny_config(hidden_size=8, output_vocab_size=self.out_vocab.size, seed=4,
                             max_iterations=30, check_interval=10)
        result = train_to_target(init_trainable(config), self.inputs, frame_text('ab', self.out_vocab),
                                 self.out_vocab, config, early_stop=False)
        self.assertEqual(result.iterations_used, 30)

    def test_final_loss_belongs_to_returned_weights(self):
        config = tiny_config(hidden_size=8, output_vocab_size=self.out_vocab.size, seed=4,
                             max_iterations=5, check_interval=5)
        target = frame_text('ab', self.out_vocab)
        start = init_trainable(config)
        result = train_to_target(start, self.inputs, target, self.out_vocab, config, early_stop=False)

        self.assertEqual(result.iterations_used, 5)
        self.assertEqual(result.final_loss, loss_and_gradients(result.weights, self.inputs, target)[0])
        last_step = start
        optimizer = RMSprop()
        for _ in range(5):
            last_step, pre_update_loss = train_step(last_step, self.inputs, target, config.learning_rate,
                                                    optimizer)
        self.assertNotEqual(result.final_loss, pre_update_loss)

    def test_optimizer_identifier(self):
        self.assertEqual(RMSprop().identifier, 'rmsprop(decay=0.9,eps=1e-07,clip=5.0)')

    def test_training_is_deterministic(self):
        config = tiny_config(hidden_size=4, output_vocab_size=self.out_vocab.size, seed=8)
        target = frame_text('ba', self.out_vocab)
        runs = []
        for _ in range(2):
            weights = init_trainable(config)
            optimizer = RMSprop()
            for _ in range(5):
                weights, _ = train_step(weights, self.inputs, target, 1e-2, optimizer)
            runs.append(weights)
        self.assertTrue(runs[0].bitwise_equal(runs[1]))
        self.assertIsInstance(runs[0], ModelWeights)
