"""Build a Mamdani rule base from data, then tune it two ways.

Wang-Mendel turns every sample into a candidate rule and resolves conflicts
by maximum degree; gradient descent then nudges the MF centers through a
differentiable surrogate, while the genetic algorithm searches the same
centers with tournament selection and elitism, scored by the full
max-aggregation/centroid pipeline.

Run:  python demos/demo_mamdani.py
"""

from softdss import tace
from softdss.bench import unit_score_variable, unit_variables
from softdss.mamdani import GaConfig, ga_optimize, gd_tune, wang_mendel

master = tace.normalize(tace.generate(7, 1000))
train, test = tace.split(master, 0.9, seed=1)

inputs = unit_variables(3, "triangle")
output = unit_score_variable(3)

model = wang_mendel(train.x, train.y, inputs, output)
print(f"Wang-Mendel extracted {len(model.rules)} conflict-free rules "
      f"from {len(train)} samples:")
for rule in model.rules:
    ants = " and ".join(
        f"{var.name} is {var.labels[i]}" for var, i in zip(inputs, rule.antecedent)
    )
    print(f"  if {ants} then score is {output.labels[rule.consequent]}"
          f"  (weight {rule.weight:.3f})")

print(f"\nuntuned:    train RMSE {model.rmse(train.x, train.y):.4f}  "
      f"test RMSE {model.rmse(test.x, test.y):.4f}")

tuned, report = gd_tune(model, train.x, train.y, learning_rate=0.5, momentum=0.3, epochs=10)
print(f"gradient:   train RMSE {tuned.rmse(train.x, train.y):.4f}  "
      f"test RMSE {tuned.rmse(test.x, test.y):.4f}   "
      f"(10 epochs, lr 0.5, momentum 0.3)")

config = GaConfig(population=50, generations=100, mutation_rate=0.01, seed=1)
evolved, curve = ga_optimize(model, train.x, train.y, config)
print(f"genetic:    train RMSE {evolved.rmse(train.x, train.y):.4f}  "
      f"test RMSE {evolved.rmse(test.x, test.y):.4f}   "
      f"(pop 50, 100 generations, mutation 0.01)")
print(f"\nGA best fitness (-RMSE): generation 1 {curve[0]:.4f} -> "
      f"generation 100 {curve[-1]:.4f} (non-decreasing with elitism)")
