import logging

from utils.logging_config import setup_logging, RunLogCollector


def test_setup_logging_sets_level_and_stdout_handler(capsys):
    setup_logging('WARNING')
    root = logging.getLogger()
    assert root.level == logging.WARNING
    assert len(root.handlers) == 1

    logging.getLogger('gsabfd.test').warning('bearing looks odd')
    logging.getLogger('gsabfd.test').info('hidden')
    captured = capsys.readouterr()
    assert 'WARNING - bearing looks odd' in captured.out
    assert 'hidden' not in captured.out
    assert captured.err == ''


def test_unknown_level_falls_back_to_info():
    setup_logging('chatty')
    assert logging.getLogger().level == logging.INFO


def test_log_file_receives_records(tmp_path):
    path = tmp_path / 'run.log'
    setup_logging('INFO', str(path))
    logging.getLogger('gsabfd.test').info('written to file')
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert 'written to file' in path.read_text()
    for handler in list(logging.getLogger().handlers):
        handler.close()


def test_collector_keeps_latest_records():
    collector = RunLogCollector(max_logs=3)
    logger = logging.getLogger('gsabfd.collector')
    logger.addHandler(collector)
    logger.setLevel(logging.INFO)
    try:
        for i in range(5):
            logger.info(f"message {i}")
        logger.error('failure')
    finally:
        logger.removeHandler(collector)

    assert [log['message'] for log in collector.get_logs()] == ['message 3', 'message 4', 'failure']
    assert [log['message'] for log in collector.get_logs('ERROR')] == ['failure']
    collector.clear_logs()
    assert collector.get_logs() == []
