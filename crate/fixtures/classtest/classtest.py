from typing import List, Tuple

class TestClassA:
    def __init__(self, a: float, b: List[int]) -> None:
        self.a = a
        self.b = b

class TestClassB:
    def __init__(self, a: int, b: TestClassA) -> None:
        self.a = a
        self.b = b

def use_a(a: TestClassA) -> Tuple[float, List[int]]:
    return (a.a, a.b)

def use_b(b: TestClassB) -> Tuple[int, TestClassA]:
    return (b.a, b.b)

a_inst = TestClassA(3.5, [1, 2, 3])
b_inst = TestClassB(4, a_inst)

use_a(a_inst)
use_b(b_inst)
