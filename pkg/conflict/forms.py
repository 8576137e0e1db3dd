"""Validation of experiment configuration files.

Every section of a config file (``dynamics.alpha=0.3``) is checked by its own
form; field names are the keys after the dot, so form errors map straight
back to the offending line.
"""
import math

from django import forms

from conflict.graph_model import KERNEL_FORMS
from conflict.influence_dynamics import EXPOSURE_MODELS


def _parse_floats(text, what='value'):
    try:
        values = [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise forms.ValidationError(f'Expected comma separated numbers, got {text!r}.')
    if not values:
        raise forms.ValidationError(f'Empty {what}.')
    if not all(math.isfinite(v) for v in values):
        raise forms.ValidationError(f'{what.capitalize()} must be finite.')
    return values


class VectorField(forms.CharField):
    """``-1,0`` -> [-1.0, 0.0]"""

    def to_python(self, value):
        value = super().to_python(value)
        if value in self.empty_values:
            return None
        return _parse_floats(value, 'vector')


class VectorListField(forms.CharField):
    """``-1,0;1,0`` -> [[-1.0, 0.0], [1.0, 0.0]]"""

    def to_python(self, value):
        value = super().to_python(value)
        if value in self.empty_values:
            return None
        rows = [_parse_floats(part, 'vector') for part in value.split(';') if part.strip()]
        if len({len(r) for r in rows}) > 1:
            raise forms.ValidationError('All vectors must have the same dimension.')
        return rows


class WeightField(VectorListField):
    """A scalar (times identity), a diagonal ``3,0`` or a full matrix ``1,0;0,1``."""

    def to_python(self, value):
        rows = super().to_python(value)
        if rows is None:
            return None
        # Plain lists: Field.validate tests membership in empty_values.
        if len(rows) == 1:
            return rows[0]
        if len(rows) != len(rows[0]):
            raise forms.ValidationError(f'Weight matrix must be square, got {len(rows)}x{len(rows[0])}.')
        return rows


class IntListField(forms.CharField):
    def to_python(self, value):
        value = super().to_python(value)
        if value in self.empty_values:
            return None
        try:
            return [int(part) for part in value.split(',') if part.strip()]
        except ValueError:
            raise forms.ValidationError(f'Expected comma separated integers, got {value!r}.')


class SectionForm(forms.Form):
    """Form bound to the keys of one ``section.*`` block."""
    section = ''

    def __init__(self, data=None, **kwargs):
        kwargs.setdefault('prefix', self.section)
        super().__init__(data, **kwargs)

    def add_prefix(self, field_name):
        return f'{self.prefix}.{field_name}' if self.prefix else field_name

    def dotted_errors(self):
        out = {}
        for name, errors in self.errors.items():
            key = self.section if name == '__all__' else self.add_prefix(name)
            out[key] = ' '.join(str(e) for e in errors)
        return out


class NetworkForm(SectionForm):
    section = 'network'
    KIND_CHOICES = (('synthetic', 'Synthetic Gaussian mixture'), ('edge_list', 'SNAP edge list'))

    kind = forms.ChoiceField(choices=KIND_CHOICES)
    n = forms.IntegerField(min_value=2, required=False)
    means = VectorListField(required=False)
    spreads = VectorField(required=False)
    fractions = VectorField(required=False)
    path = forms.CharField(required=False)
    iterations = forms.IntegerField(min_value=1)
    embedding_seed = forms.IntegerField()

    def clean(self):
        cleaned = super().clean()
        if cleaned.get('kind') == 'synthetic':
            means, spreads, fractions = cleaned.get('means'), cleaned.get('spreads'), cleaned.get('fractions')
            if not cleaned.get('n'):
                self.add_error('n', 'Required for a synthetic network.')
            if not means:
                self.add_error('means', 'Required for a synthetic network.')
            elif spreads is None or fractions is None:
                self.add_error('fractions', 'spreads and fractions are required for a synthetic network.')
            elif not (len(means) == len(spreads) == len(fractions)):
                self.add_error('fractions', 'means, spreads and fractions must list the same number of components.')
            else:
                if any(s < 0 for s in spreads):
                    self.add_error('spreads', 'Spreads must be non-negative.')
                if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
                    self.add_error('fractions', 'Fractions must be non-negative and sum to 1.')
        elif cleaned.get('kind') == 'edge_list' and not cleaned.get('path'):
            self.add_error('path', 'Required for an edge-list network.')
        return cleaned


class DynamicsForm(SectionForm):
    section = 'dynamics'

    alpha = forms.FloatField(min_value=0.0, max_value=1.0)
    kappa_a = forms.FloatField()
    kappa_d = forms.FloatField()
    stubbornness = forms.FloatField(min_value=0.0, max_value=1.0)
    eta = forms.FloatField(min_value=0.0)
    sigmoid_gain = forms.FloatField()
    clamp_rate = forms.NullBooleanField()
    exposure = forms.ChoiceField(choices=[(m, m) for m in EXPOSURE_MODELS])

    def clean_alpha(self):
        alpha = self.cleaned_data['alpha']
        if alpha >= 1.0:
            raise forms.ValidationError('Sharing probability must be below 1.')
        return alpha

    def clean(self):
        cleaned = super().clean()
        for name in ('kappa_a', 'kappa_d', 'sigmoid_gain'):
            value = cleaned.get(name)
            if value is not None and not value > 0:
                self.add_error(name, 'Must be positive.')
        if cleaned.get('clamp_rate') is None:
            cleaned['clamp_rate'] = True
        return cleaned


class KernelForm(SectionForm):
    section = 'kernel'

    form = forms.ChoiceField(choices=[(f, f) for f in KERNEL_FORMS])
    sigma = forms.FloatField()

    def clean_sigma(self):
        sigma = self.cleaned_data['sigma']
        if not sigma > 0:
            raise forms.ValidationError('Homophily coefficient must be positive.')
        return sigma


class PlayerForm(SectionForm):
    """``adversary.*`` / ``defender.*``; an empty target means each individual's own x_0."""

    state_weight = WeightField()
    input_weight = WeightField()
    target = VectorField(required=False)
    initial_message = VectorField(required=False)

    def __init__(self, data=None, section='defender', **kwargs):
        self.section = section
        super().__init__(data, **kwargs)


class SolverForm(SectionForm):
    section = 'solver'

    horizon = forms.IntegerField(min_value=1)
    max_level = forms.IntegerField(min_value=1)
    fd_step = forms.FloatField()
    replan_interval = forms.IntegerField(min_value=1)
    steps = forms.IntegerField(min_value=1)
    reroll_each_level = forms.NullBooleanField()

    def clean(self):
        cleaned = super().clean()
        h, r, t = cleaned.get('horizon'), cleaned.get('replan_interval'), cleaned.get('steps')
        if None not in (h, r, t) and not (r <= h <= t):
            self.add_error('horizon', 'Need replan_interval <= horizon <= steps.')
        if cleaned.get('fd_step') is not None and not cleaned['fd_step'] > 0:
            self.add_error('fd_step', 'Must be positive.')
        if cleaned.get('reroll_each_level') is None:
            cleaned['reroll_each_level'] = True
        return cleaned


class ClusteringForm(SectionForm):
    section = 'clustering'

    m0 = forms.IntegerField(min_value=1)
    split_threshold = forms.FloatField(min_value=0.0, max_value=1.0)
    merge_epsilon = forms.FloatField(min_value=0.0)
    mass_weighted = forms.NullBooleanField()

    def clean(self):
        cleaned = super().clean()
        if cleaned.get('split_threshold') == 0.0:
            self.add_error('split_threshold', 'Must be positive.')
        cleaned['mass_weighted'] = bool(cleaned.get('mass_weighted'))
        return cleaned


class RunForm(SectionForm):
    section = 'run'

    seeds = IntListField()
    sigmas = VectorField(required=False)
    output_dir = forms.CharField(required=False)

    def clean_seeds(self):
        seeds = self.cleaned_data['seeds']
        if not seeds:
            raise forms.ValidationError('At least one seed is required.')
        return seeds

    def clean_sigmas(self):
        sigmas = self.cleaned_data.get('sigmas')
        if sigmas and any(s <= 0 for s in sigmas):
            raise forms.ValidationError('Every sigma must be positive.')
        return sigmas
