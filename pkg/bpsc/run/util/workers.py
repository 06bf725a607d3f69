# Copyright 2026 The BPSC Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

import multiprocessing


def execute_function_multiprocess(fn,
                                  args_list,
                                  max_concurrent_executions=1,
                                  initializer=None,
                                  initargs=()):
    """
    Executes fn once per set of args in args_list, in worker processes when
    more than one execution may run at a time.
    :param fn: module-level function to be executed; it and its arguments
    must be picklable
    :param args_list: one argument list per call
    :type args_list: list(list)
    :param max_concurrent_executions: upper bound on worker processes; 1 runs
    every call in the calling process
    :type max_concurrent_executions: int
    :param initializer: called with initargs in every worker before its
    first call
    :return:
        {
            index: result of fn with args_list[index]
        }
    :rtype: dict
    """
    number_of_workers = min(max_concurrent_executions, len(args_list))
    if number_of_workers <= 1:
        return {index: fn(*args) for index, args in enumerate(args_list)}

    ctx = multiprocessing.get_context('spawn')
    pool = ctx.Pool(processes=number_of_workers, initializer=initializer, initargs=initargs)
    try:
        results = pool.starmap(fn, [list(args) for args in args_list], chunksize=1)
    finally:
        pool.close()
        pool.join()
    return dict(enumerate(results))
